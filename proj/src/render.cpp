#include "rnifs/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rnifs/errors.hpp"

namespace rnifs {

namespace {

struct Extent {
    double xmin, ymin, w, h;
};

// Cloud bounding box padded by 1% of each extent per side. Zero extents get
// a unit reference span so binning never divides by zero.
Extent padded_extent(const PointCloud& cloud) {
    double xmin = cloud.points.front().x, xmax = xmin;
    double ymin = cloud.points.front().y, ymax = ymin;
    for (const Point2& p : cloud.points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    double w = xmax - xmin, h = ymax - ymin;
    if (w == 0.0) {
        xmin -= 0.5;
        w = 1.0;
    }
    if (h == 0.0) {
        ymin -= 0.5;
        h = 1.0;
    }
    const double px = 0.01 * w, py = 0.01 * h;
    return {xmin - px, ymin - py, w + 2.0 * px, h + 2.0 * py};
}

std::size_t bin(double coord, double origin, double cell, std::size_t n) {
    const auto i = static_cast<long long>(std::floor((coord - origin) / cell));
    return static_cast<std::size_t>(
        std::clamp<long long>(i, 0, static_cast<long long>(n) - 1));
}

void write_ppm(const std::vector<std::uint8_t>& rgb, std::size_t w, std::size_t h,
               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    char header[64];
    std::snprintf(header, sizeof header, "P6\n%zu %zu\n255\n", w, h);
    out << header;
    out.write(reinterpret_cast<const char*>(rgb.data()),
              static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::uint64_t DensityGrid::total() const {
    std::uint64_t t = 0;
    for (std::uint32_t c : counts) t += c;
    return t;
}

std::uint32_t DensityGrid::max_count() const {
    std::uint32_t m = 0;
    for (std::uint32_t c : counts) m = std::max(m, c);
    return m;
}

DensityGrid density_grid(const PointCloud& cloud, std::size_t nx, std::size_t ny) {
    if (cloud.points.empty()) throw EmptyCloudError("cannot bin an empty cloud");
    if (nx < 1 || ny < 1) throw ValidationError("grid needs at least one cell");

    const Extent e = padded_extent(cloud);
    DensityGrid grid;
    grid.nx = nx;
    grid.ny = ny;
    grid.origin = {e.xmin, e.ymin};
    grid.cell_w = e.w / static_cast<double>(nx);
    grid.cell_h = e.h / static_cast<double>(ny);
    grid.counts.assign(nx * ny, 0);
    for (const Point2& p : cloud.points) {
        const std::size_t ix = bin(p.x, e.xmin, grid.cell_w, nx);
        const std::size_t iy = bin(p.y, e.ymin, grid.cell_h, ny);
        ++grid.counts[iy * nx + ix];
    }
    return grid;
}

const std::array<std::array<std::uint8_t, 3>, 256>& plasma_table() {
    static const auto table = [] {
        // Anchor stops of the familiar plasma ramp, linearly interpolated.
        constexpr double stops[8][4] = {
            {0.00, 13, 8, 135},   {0.14, 84, 2, 163},   {0.29, 139, 10, 165},
            {0.43, 185, 50, 137}, {0.57, 219, 92, 104}, {0.71, 244, 136, 73},
            {0.86, 254, 188, 43}, {1.00, 240, 249, 33},
        };
        std::array<std::array<std::uint8_t, 3>, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double v = static_cast<double>(i) / 255.0;
            int s = 0;
            while (s < 6 && v > stops[s + 1][0]) ++s;
            const double span = stops[s + 1][0] - stops[s][0];
            const double f = (v - stops[s][0]) / span;
            for (int c = 0; c < 3; ++c) {
                const double val =
                    stops[s][c + 1] + f * (stops[s + 1][c + 1] - stops[s][c + 1]);
                t[i][c] = static_cast<std::uint8_t>(std::lround(
                    std::clamp(val, 0.0, 255.0)));
            }
        }
        return t;
    }();
    return table;
}

void write_density_image(const DensityGrid& grid, const std::filesystem::path& path) {
    if (grid.counts.size() != grid.nx * grid.ny || grid.counts.empty())
        throw ValidationError("malformed density grid");
    const auto& table = plasma_table();
    const double max_c = grid.max_count();
    const double denom = max_c > 0.0 ? std::log1p(max_c) : 1.0;

    std::vector<std::uint8_t> rgb(grid.nx * grid.ny * 3);
    std::size_t o = 0;
    for (std::size_t row = 0; row < grid.ny; ++row) {
        const std::size_t iy = grid.ny - 1 - row;  // image rows top-down
        for (std::size_t ix = 0; ix < grid.nx; ++ix) {
            const double v = std::log1p(grid.at(ix, iy)) / denom;
            const auto idx = static_cast<std::size_t>(
                std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
            rgb[o++] = table[idx][0];
            rgb[o++] = table[idx][1];
            rgb[o++] = table[idx][2];
        }
    }
    write_ppm(rgb, grid.nx, grid.ny, path);
}

void write_scatter_image(const PointCloud& cloud, std::size_t width,
                         std::size_t height, const std::filesystem::path& path) {
    const DensityGrid grid = density_grid(cloud, width, height);
    constexpr std::uint8_t bg[3] = {10, 10, 30};
    constexpr std::uint8_t fg[3] = {255, 255, 255};

    std::vector<std::uint8_t> rgb(width * height * 3);
    std::size_t o = 0;
    for (std::size_t row = 0; row < height; ++row) {
        const std::size_t iy = height - 1 - row;
        for (std::size_t ix = 0; ix < width; ++ix) {
            const bool lit = grid.at(ix, iy) > 0;
            rgb[o++] = lit ? fg[0] : bg[0];
            rgb[o++] = lit ? fg[1] : bg[1];
            rgb[o++] = lit ? fg[2] : bg[2];
        }
    }
    write_ppm(rgb, width, height, path);
}

void write_loglog_csv(const BoxCountSeries& series, const DimensionEstimate& fit,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "log_inv_eps,log_count,fit_line\n";
    char line[120];
    for (std::size_t i = 0; i < series.epsilons.size(); ++i) {
        const double x = std::log(1.0 / series.epsilons[i]);
        const double y = std::log(static_cast<double>(series.counts[i]));
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", x, y,
                      fit.intercept + fit.value * x);
        out << line;
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace rnifs

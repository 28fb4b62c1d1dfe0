#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rnifs/dimension.hpp"
#include "rnifs/geometry.hpp"
#include "rnifs/system.hpp"

namespace rnifs {

// Histogram of points over a regular nx*ny grid. Row iy, column ix maps to
// counts[iy * nx + ix]; iy = 0 is the ymin edge.
struct DensityGrid {
    std::size_t nx = 0, ny = 0;
    Point2 origin;
    double cell_w = 0.0, cell_h = 0.0;
    std::vector<std::uint32_t> counts;

    std::uint32_t at(std::size_t ix, std::size_t iy) const {
        return counts[iy * nx + ix];
    }
    std::uint64_t total() const;
    std::uint32_t max_count() const;
};

// Bins the cloud over its bounding box padded by 2% (1% per side). Every
// point lands in exactly one cell; upper-boundary points go to the last cell.
DensityGrid density_grid(const PointCloud& cloud, std::size_t nx, std::size_t ny);

// Binary PPM (P6), intensity v = ln(1+c)/ln(1+max) through a fixed built-in
// 256-entry plasma-like table. Byte-identical output for identical grids.
void write_density_image(const DensityGrid& grid, const std::filesystem::path& path);

// One pixel per occupied cell, white on a dark ground, same binning as
// density_grid. Lit-pixel count equals the number of distinct occupied cells.
void write_scatter_image(const PointCloud& cloud, std::size_t width,
                         std::size_t height, const std::filesystem::path& path);

// Regression-plot export: natural-log scale pairs plus the fitted line.
void write_loglog_csv(const BoxCountSeries& series, const DimensionEstimate& fit,
                      const std::filesystem::path& path);

// The color table write_density_image uses; exposed for pixel-level tests.
const std::array<std::array<std::uint8_t, 3>, 256>& plasma_table();

}  // namespace rnifs

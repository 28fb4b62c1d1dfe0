#include "rnifs/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "rnifs/errors.hpp"

namespace rnifs {

namespace {

struct Bounds {
    Point2 lo, hi;
    double longest_side;
};

Bounds bounding_box(const PointCloud& cloud) {
    if (cloud.points.empty()) throw EmptyCloudError("point cloud is empty");
    Bounds b{cloud.points.front(), cloud.points.front(), 0.0};
    for (const Point2& p : cloud.points) {
        b.lo.x = std::min(b.lo.x, p.x);
        b.lo.y = std::min(b.lo.y, p.y);
        b.hi.x = std::max(b.hi.x, p.x);
        b.hi.y = std::max(b.hi.y, p.y);
    }
    b.longest_side = std::max(b.hi.x - b.lo.x, b.hi.y - b.lo.y);
    return b;
}

std::uint64_t cell_key(double coord, double origin, double eps, std::uint64_t max_idx) {
    const auto idx = static_cast<std::int64_t>(std::floor((coord - origin) / eps));
    const auto clamped =
        static_cast<std::uint64_t>(std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(max_idx)));
    return clamped;
}

struct Ols {
    double slope = 0.0, intercept = 0.0, r_squared = 1.0;
};

Ols least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    Ols fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            ss_res += r * r;
        }
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

// Saturation guard: keep scales where the count is neither dominated by
// noise (N < 10) nor by the finite sample (N > n/10).
std::vector<std::size_t> scale_window(const std::vector<std::size_t>& counts,
                                      std::size_t n_points) {
    std::vector<std::size_t> keep;
    const double upper = static_cast<double>(n_points) / 10.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto c = static_cast<double>(counts[i]);
        if (c >= 10.0 && c <= upper) keep.push_back(i);
    }
    return keep;
}

bool all_ones(const std::vector<std::size_t>& counts) {
    return std::all_of(counts.begin(), counts.end(),
                       [](std::size_t c) { return c == 1; });
}

}  // namespace

const char* estimator_name(DimensionEstimator e) {
    switch (e) {
        case DimensionEstimator::Box: return "box";
        case DimensionEstimator::Information: return "information";
        case DimensionEstimator::Correlation: return "correlation";
    }
    return "unknown";
}

BoxCountSeries box_counts(const PointCloud& cloud, int levels) {
    if (levels < 3) throw ValidationError("box counting needs at least 3 levels");
    const Bounds b = bounding_box(cloud);
    // A zero-extent cloud still gets a ladder of scales; every point shares
    // the single cell, so N = 1 throughout.
    const double base = b.longest_side > 0.0 ? b.longest_side : 1.0;

    BoxCountSeries series;
    series.n_points = cloud.size();
    std::unordered_set<std::uint64_t> occupied;
    for (int k = 1; k <= levels; ++k) {
        const double eps = base / static_cast<double>(1ULL << k);
        const std::uint64_t cells = 1ULL << k;
        occupied.clear();
        occupied.reserve(std::min<std::size_t>(cloud.size(), 1u << 20));
        for (const Point2& p : cloud.points) {
            const std::uint64_t ix = cell_key(p.x, b.lo.x, eps, cells - 1);
            const std::uint64_t iy = cell_key(p.y, b.lo.y, eps, cells - 1);
            occupied.insert((ix << 32) | iy);
        }
        series.epsilons.push_back(eps);
        series.counts.push_back(occupied.size());
    }
    return series;
}

DimensionEstimate fit_dimension(const BoxCountSeries& series) {
    if (series.epsilons.size() != series.counts.size() || series.epsilons.empty())
        throw ValidationError("malformed box-count series");

    DimensionEstimate est;
    est.estimator = DimensionEstimator::Box;

    if (all_ones(series.counts)) {
        // Single occupied cell at every scale: dimension 0 by definition.
        est.window_min_eps = series.epsilons.back();
        est.window_max_eps = series.epsilons.front();
        est.r_squared = 1.0;
        return est;
    }

    const auto keep = scale_window(series.counts, series.n_points);
    if (keep.size() < 3)
        throw InsufficientScalesError(
            "only " + std::to_string(keep.size()) +
            " scales survive the saturation window (need 3)");

    std::vector<double> xs, ys;
    for (std::size_t i : keep) {
        xs.push_back(std::log(1.0 / series.epsilons[i]));
        ys.push_back(std::log(static_cast<double>(series.counts[i])));
    }
    const Ols fit = least_squares(xs, ys);
    est.value = fit.slope;
    est.intercept = fit.intercept;
    est.r_squared = fit.r_squared;
    est.window_min_eps = series.epsilons[keep.back()];
    est.window_max_eps = series.epsilons[keep.front()];
    return est;
}

double similarity_bound(const ProbabilityVector& probs,
                        const std::vector<double>& ratios, bool literal_form) {
    if (probs.size() != ratios.size())
        throw DomainError("probability/ratio length mismatch");
    double plogp = 0.0, plogs = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double p = probs[i];
        const double s = ratios[i];
        if (!(p > 0.0) || p > 1.0) throw DomainError("probability outside (0,1]");
        if (!(s > 0.0) || !(s < 1.0)) throw DomainError("ratio outside (0,1)");
        plogp += p * std::log(p);
        plogs += p * std::log(s);
    }
    if (literal_form) {
        if (plogp == 0.0)
            throw DomainError("literal form is ill-posed: sum p_i ln p_i = 0");
        return plogs / plogp;
    }
    return plogp == 0.0 ? 0.0 : plogp / plogs;
}

CorrelationSeries correlation_series(const PointCloud& cloud,
                                     const std::vector<double>& radii,
                                     std::size_t max_pairs, std::uint64_t seed) {
    const std::size_t n = cloud.size();
    if (n < 100)
        throw ValidationError("correlation dimension needs at least 100 points");
    if (max_pairs < 100) throw ValidationError("max_pairs must be at least 100");

    const auto& pts = cloud.points;
    std::vector<double> dists;
    const std::size_t total_pairs = n * (n - 1) / 2;
    if (total_pairs <= max_pairs) {
        dists.reserve(total_pairs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dists.push_back(distance(pts[i], pts[j]));
    } else {
        dists.reserve(max_pairs);
        Xoshiro256ss rng(seed);
        while (dists.size() < max_pairs) {
            const auto i = static_cast<std::size_t>(rng.uniform01() * n);
            const auto j = static_cast<std::size_t>(rng.uniform01() * n);
            if (i == j) continue;
            dists.push_back(distance(pts[i], pts[j]));
        }
    }
    std::sort(dists.begin(), dists.end());

    CorrelationSeries series;
    series.n_pairs_sampled = dists.size();
    for (double r : radii) {
        const auto le = std::upper_bound(dists.begin(), dists.end(), r);
        series.radii.push_back(r);
        series.correlations.push_back(static_cast<double>(le - dists.begin()) /
                                      static_cast<double>(dists.size()));
    }
    return series;
}

DimensionEstimate correlation_dimension(const PointCloud& cloud,
                                        const std::vector<double>& radii,
                                        std::size_t max_pairs, std::uint64_t seed) {
    const CorrelationSeries series = correlation_series(cloud, radii, max_pairs, seed);

    DimensionEstimate est;
    est.estimator = DimensionEstimator::Correlation;

    // Zero-diameter cloud: every pair is coincident, dimension 0. Checked
    // on the cloud itself: a spread cloud whose radii all exceed its
    // diameter is a window failure below, not a point mass.
    const Bounds b = bounding_box(cloud);
    const bool degenerate = b.lo.x == b.hi.x && b.lo.y == b.hi.y;
    if (degenerate && !series.radii.empty()) {
        est.window_min_eps = series.radii.back();
        est.window_max_eps = series.radii.front();
        est.r_squared = 1.0;
        return est;
    }

    const double lower = 100.0 / static_cast<double>(series.n_pairs_sampled);
    std::vector<double> xs, ys;
    double rmin = 0.0, rmax = 0.0;
    for (std::size_t i = 0; i < series.radii.size(); ++i) {
        const double c = series.correlations[i];
        if (c < lower || c > 0.1) continue;
        if (xs.empty()) rmax = series.radii[i];
        rmin = series.radii[i];
        xs.push_back(std::log(series.radii[i]));
        ys.push_back(std::log(c));
    }
    if (xs.size() < 3)
        throw InsufficientScalesError("correlation window keeps " +
                                      std::to_string(xs.size()) +
                                      " radii (need 3)");
    const Ols fit = least_squares(xs, ys);
    est.value = fit.slope;
    est.intercept = fit.intercept;
    est.r_squared = fit.r_squared;
    est.window_min_eps = std::min(rmin, rmax);
    est.window_max_eps = std::max(rmin, rmax);
    return est;
}

EntropySeries entropy_series(const PointCloud& cloud, int levels) {
    if (levels < 3) throw ValidationError("entropy series needs at least 3 levels");
    const Bounds b = bounding_box(cloud);
    const double base = b.longest_side > 0.0 ? b.longest_side : 1.0;

    EntropySeries series;
    series.n_points = cloud.size();
    const double n = static_cast<double>(cloud.size());
    std::unordered_map<std::uint64_t, std::uint32_t> cells;
    for (int k = 1; k <= levels; ++k) {
        const double eps = base / static_cast<double>(1ULL << k);
        const std::uint64_t ncells = 1ULL << k;
        cells.clear();
        for (const Point2& p : cloud.points) {
            const std::uint64_t ix = cell_key(p.x, b.lo.x, eps, ncells - 1);
            const std::uint64_t iy = cell_key(p.y, b.lo.y, eps, ncells - 1);
            ++cells[(ix << 32) | iy];
        }
        double h = 0.0;
        for (const auto& [key, count] : cells) {
            const double mu = static_cast<double>(count) / n;
            h -= mu * std::log(mu);
        }
        series.epsilons.push_back(eps);
        series.entropies.push_back(h);
        series.counts.push_back(cells.size());
    }
    return series;
}

DimensionEstimate information_dimension(const PointCloud& cloud, int levels) {
    if (cloud.size() < 100)
        throw ValidationError("information dimension needs at least 100 points");
    const EntropySeries series = entropy_series(cloud, levels);

    DimensionEstimate est;
    est.estimator = DimensionEstimator::Information;

    if (all_ones(series.counts)) {
        est.window_min_eps = series.epsilons.back();
        est.window_max_eps = series.epsilons.front();
        est.r_squared = 1.0;
        return est;
    }

    const auto keep = scale_window(series.counts, series.n_points);
    if (keep.size() < 3)
        throw InsufficientScalesError(
            "only " + std::to_string(keep.size()) +
            " scales survive the saturation window (need 3)");

    std::vector<double> xs, ys;
    for (std::size_t i : keep) {
        xs.push_back(std::log(1.0 / series.epsilons[i]));
        ys.push_back(series.entropies[i]);
    }
    const Ols fit = least_squares(xs, ys);
    est.value = fit.slope;
    est.intercept = fit.intercept;
    est.r_squared = fit.r_squared;
    est.window_min_eps = series.epsilons[keep.back()];
    est.window_max_eps = series.epsilons[keep.front()];
    return est;
}

std::vector<double> default_radii(const PointCloud& cloud, int levels) {
    const Bounds b = bounding_box(cloud);
    const double diag = distance(b.lo, b.hi);
    const double base = diag > 0.0 ? diag : 1.0;
    std::vector<double> radii;
    for (int k = 1; k <= levels; ++k)
        radii.push_back(base * std::pow(2.0, -0.5 * k));
    return radii;
}

std::string to_json(const DimensionEstimate& est) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"estimator\":\"%s\",\"value\":%.6f,\"r_squared\":%.6f,"
                  "\"window\":[%.9g,%.9g]}",
                  estimator_name(est.estimator), est.value, est.r_squared,
                  est.window_min_eps, est.window_max_eps);
    return buf;
}

namespace {

void write_two_column_csv(const std::filesystem::path& path, const char* header,
                          const std::vector<double>& xs,
                          const std::vector<double>& ys) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    std::fprintf(f, "%s\n", header);
    for (std::size_t i = 0; i < xs.size(); ++i)
        std::fprintf(f, "%.17g,%.17g\n", xs[i], ys[i]);
    if (std::fclose(f) != 0) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_box_series_csv(const BoxCountSeries& series,
                          const std::filesystem::path& path) {
    std::vector<double> counts(series.counts.begin(), series.counts.end());
    write_two_column_csv(path, "epsilon,count", series.epsilons, counts);
}

void write_entropy_series_csv(const EntropySeries& series,
                              const std::filesystem::path& path) {
    write_two_column_csv(path, "epsilon,entropy", series.epsilons,
                         series.entropies);
}

void write_correlation_series_csv(const CorrelationSeries& series,
                                  const std::filesystem::path& path) {
    write_two_column_csv(path, "radius,correlation", series.radii,
                         series.correlations);
}

}  // namespace rnifs

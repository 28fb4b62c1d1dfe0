#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rnifs/system.hpp"

namespace rnifs {

// Occupied-box counts N(eps) at dyadic scales eps_k = L / 2^k, where L is
// the longest bounding-box side of the cloud.
struct BoxCountSeries {
    std::vector<double> epsilons;      // decreasing
    std::vector<std::size_t> counts;   // N(eps_k)
    std::size_t n_points = 0;
};

enum class DimensionEstimator { Box, Information, Correlation };

const char* estimator_name(DimensionEstimator e);

struct DimensionEstimate {
    double value = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double window_min_eps = 0.0;  // smallest scale used by the fit
    double window_max_eps = 0.0;  // largest scale used by the fit
    DimensionEstimator estimator = DimensionEstimator::Box;
};

// Grid anchored at the bounding-box minimum corner; points on the upper
// boundary land in the last cell. Throws EmptyCloudError.
BoxCountSeries box_counts(const PointCloud& cloud, int levels);

// OLS of log N against log(1/eps) over the saturation-guarded window
// {eps : 10 <= N(eps) <= n_points/10}. Needs >= 3 surviving scales
// (InsufficientScalesError otherwise). A series that is constant at
// N = 1 (single distinct point) short-circuits to dimension 0.
DimensionEstimate fit_dimension(const BoxCountSeries& series);

// Closed-form similarity-dimension bound for similitude systems with
// ratios s_i in (0,1). The default orientation
//     (sum p_i ln p_i) / (sum p_i ln s_i)
// is the standard one; it reproduces ln3/ln2 for the uniform-1/3, ratio-1/2
// triangle system. literal_form selects the transposed quotient
//     (sum p_i ln s_i) / (sum p_i ln p_i)
// kept for comparison; the two disagree except at fixed points of x -> 1/x,
// and the literal form is ill-posed (DomainError) when sum p_i ln p_i = 0.
double similarity_bound(const ProbabilityVector& probs,
                        const std::vector<double>& ratios,
                        bool literal_form = false);

// Grassberger-Procaccia: C(r) over sampled point pairs (at most max_pairs,
// seeded subsampling once the full pair count exceeds it), slope of
// log C vs log r over {r : 100/n_sampled <= C(r) <= 0.1}.
DimensionEstimate correlation_dimension(const PointCloud& cloud,
                                        const std::vector<double>& radii,
                                        std::size_t max_pairs, std::uint64_t seed);

// Occupied-cell Shannon entropy H(eps) regressed against ln(1/eps) over the
// same saturation-guarded window as box counting.
DimensionEstimate information_dimension(const PointCloud& cloud, int levels);

// Entropy series behind information_dimension, exported alongside it.
struct EntropySeries {
    std::vector<double> epsilons;
    std::vector<double> entropies;       // H(eps), nats
    std::vector<std::size_t> counts;     // occupied cells, reused for the window
    std::size_t n_points = 0;
};
EntropySeries entropy_series(const PointCloud& cloud, int levels);

// Pair-correlation curve behind correlation_dimension.
struct CorrelationSeries {
    std::vector<double> radii;
    std::vector<double> correlations;    // C(r)
    std::size_t n_pairs_sampled = 0;
};
CorrelationSeries correlation_series(const PointCloud& cloud,
                                     const std::vector<double>& radii,
                                     std::size_t max_pairs, std::uint64_t seed);

// Half-octave radius ladder spanning the cloud's bounding-box diagonal,
// the default input to correlation_dimension.
std::vector<double> default_radii(const PointCloud& cloud, int levels = 24);

// JSON object {estimator, value, r_squared, window:[min,max]}.
std::string to_json(const DimensionEstimate& est);

// Raw-series CSV exports: "epsilon,count", "epsilon,entropy", and
// "radius,correlation" respectively, one row per scale.
void write_box_series_csv(const BoxCountSeries& series,
                          const std::filesystem::path& path);
void write_entropy_series_csv(const EntropySeries& series,
                              const std::filesystem::path& path);
void write_correlation_series_csv(const CorrelationSeries& series,
                                  const std::filesystem::path& path);

inline constexpr int kDefaultBoxLevels = 12;
inline constexpr std::size_t kDefaultMaxPairs = 2000000;

}  // namespace rnifs

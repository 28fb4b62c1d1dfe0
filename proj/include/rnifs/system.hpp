#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rnifs/geometry.hpp"
#include "rnifs/maps.hpp"
#include "rnifs/rng.hpp"

namespace rnifs {

// Strictly positive weights summing to 1 within 1e-12.
struct ProbabilityVector {
    std::vector<double> p;

    std::size_t size() const { return p.size(); }
    double operator[](std::size_t i) const { return p[i]; }

    // Throws InvalidProbabilitiesError unless the invariants hold.
    static ProbabilityVector checked(std::vector<double> weights);
};

// A finite map family paired with selection probabilities.
struct RnifsSystem {
    std::vector<MapDescriptor> maps;
    ProbabilityVector probs;

    std::size_t size() const { return maps.size(); }
};

// Builds a system from registry ids. Throws UnknownMapError / the
// probability errors on bad input.
RnifsSystem make_system(const std::vector<std::string>& map_ids,
                        std::vector<double> probs);

// The empirical attractor: post-burn-in orbit points plus the seed and
// config digest that produced them.
struct PointCloud {
    std::vector<Point2> points;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::size_t burn_in = 0;
    std::size_t total_iterations = 0;

    std::size_t size() const { return points.size(); }
};

struct ValidationReport {
    std::size_t n_maps = 0;
    std::vector<double> per_map_lipschitz;  // advisory estimates over the reference window
    double mean_contraction_factor = 0.0;   // sum of p_i * s_i
    bool contractive_on_window = false;     // mean factor < 1
};

// Hard checks (probability invariants, length match) throw; the returned
// report carries advisory per-map Lipschitz estimates and their mean factor.
ValidationReport validate(const RnifsSystem& sys);

// Inverse-CDF draw of a map index; advances the rng by one uniform.
// Rounding shortfalls in the cumulative scan select the last index.
std::size_t sample_index(const ProbabilityVector& probs, Xoshiro256ss& rng);

// Chaos-game orbit: x_{n+1} = f_{w_n}(x_n) for `total` steps, first `burn_in`
// discarded. Deterministic for identical (sys, x0, total, burn_in, seed).
// Throws DivergedError once any iterate leaves |x|,|y| <= 100 or goes
// non-finite.
PointCloud generate_orbit(const RnifsSystem& sys, Point2 x0, std::size_t total,
                          std::size_t burn_in, std::uint64_t seed);

// Dirichlet sample via normalized Marsaglia-Tsang gamma variates.
// Throws InvalidAlphasError on non-positive entries.
ProbabilityVector dirichlet_probabilities(const std::vector<double>& alphas,
                                          Xoshiro256ss& rng);

// CSV with header "x,y", one row per point in iteration order, 17 significant
// digits (round-trips doubles exactly).
void write_points_csv(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_points_csv(const std::filesystem::path& path);

// Orbit escape radius before DivergedError fires.
inline constexpr double kDivergenceRadius = 100.0;

// Defaults used when a config omits them.
inline constexpr Point2 kDefaultX0{0.1, 0.1};
inline constexpr std::size_t kDefaultIterations = 100000;
inline constexpr std::size_t kDefaultBurnIn = 1000;

}  // namespace rnifs

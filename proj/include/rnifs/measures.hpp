#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <utility>
#include <vector>

#include "rnifs/errors.hpp"
#include "rnifs/geometry.hpp"
#include "rnifs/rng.hpp"
#include "rnifs/system.hpp"

namespace rnifs {

// Weighted finite support standing in for a probability measure on R^2.
// Invariant: |sum(weights) - 1| <= 1e-9, every weight >= 0, points finite.
struct EmpiricalMeasure {
    std::vector<Point2> support;
    std::vector<double> weights;

    std::size_t size() const { return support.size(); }
    void validate() const;

    static EmpiricalMeasure dirac(Point2 p);
    static EmpiricalMeasure uniform_on(std::vector<Point2> pts);
    static EmpiricalMeasure weighted(std::vector<Point2> pts,
                                     std::vector<double> w);
};

struct ConvergenceTrace {
    std::vector<double> step_distances;  // d(mu_k, mu_{k+1})
    std::vector<double> ratios;          // step_distances[k+1] / step_distances[k]
    double theoretical_factor = 0.0;     // sum_i p_i * s_i (estimated Lipschitz)
};

// Raised when fixed-point iteration exhausts max_steps; carries the last
// iterate and the full trace so callers can inspect rather than abort.
class NoConvergenceError : public Error {
  public:
    NoConvergenceError(std::size_t max_steps, EmpiricalMeasure last,
                       ConvergenceTrace trace);
    const EmpiricalMeasure& last_measure() const noexcept { return last_; }
    const ConvergenceTrace& trace() const noexcept { return trace_; }
    std::size_t max_steps() const noexcept { return max_steps_; }

  private:
    std::size_t max_steps_;
    EmpiricalMeasure last_;
    ConvergenceTrace trace_;
};

inline constexpr std::size_t kNoSupportCap = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kDefaultSupportCap = 4096;
inline constexpr std::size_t kDefaultSlicedProjections = 128;

// Exact-solver scope: beyond these the caller gets SupportTooLargeError and
// should fall back to the sliced estimator.
inline constexpr std::size_t kExactUniformMaxPerSide = 1024;
inline constexpr std::size_t kExactGeneralMaxCombined = 512;

EmpiricalMeasure pushforward(const EmpiricalMeasure& mu, const MapDescriptor& m);

// One application of the mixture operator sum_i p_i * (f_i # mu). The exact
// result has size() * n_maps atoms; anything past `cap` is reduced to `cap`
// equally weighted atoms by systematic resampling.
EmpiricalMeasure hutchinson_step(const RnifsSystem& sys,
                                 const EmpiricalMeasure& mu, std::size_t cap,
                                 Xoshiro256ss& rng);

double wasserstein1_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

double wasserstein1_sliced(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                           std::size_t n_projections, Xoshiro256ss& rng);

// Repeated hutchinson_step until the distance between successive iterates
// drops below tol. Uses the exact metric while both supports fit its scope,
// the sliced estimator (with one fixed direction set) otherwise.
std::pair<EmpiricalMeasure, ConvergenceTrace> iterate_to_invariance(
    const RnifsSystem& sys, const EmpiricalMeasure& mu0, double tol,
    std::size_t max_steps, std::size_t cap, Xoshiro256ss& rng);

void write_measure_csv(const EmpiricalMeasure& mu,
                       const std::filesystem::path& path);
void write_trace_csv(const ConvergenceTrace& trace,
                     const std::filesystem::path& path);

namespace detail {
// Exposed for cross-validation in tests; both compute exact optimal transport.
// solve_assignment: equal-count uniform measures, square cost matrix.
// solve_transportation: arbitrary non-negative supplies/demands summing to 1.
double solve_assignment(const std::vector<Point2>& a, const std::vector<Point2>& b);
double solve_transportation(const std::vector<Point2>& a, const std::vector<double>& wa,
                            const std::vector<Point2>& b, const std::vector<double>& wb);
}  // namespace detail

}  // namespace rnifs

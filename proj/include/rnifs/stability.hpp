#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rnifs/geometry.hpp"
#include "rnifs/system.hpp"

namespace rnifs {

enum class StabilityVerdict { ContractiveOnAverage, Indeterminate, ExpansiveOnAverage };

const char* verdict_name(StabilityVerdict v);

// Pure classification rule: ContractiveOnAverage iff estimate + 2*std_error < 0,
// ExpansiveOnAverage iff estimate - 2*std_error > 0, Indeterminate otherwise.
StabilityVerdict verdict_for(double estimate, double std_error);

struct LyapunovEstimate {
    double estimate = 0.0;   // nats per iteration
    double std_error = 0.0;  // sample std / sqrt(n)
};

struct StabilityReport {
    double lyapunov_estimate = 0.0;
    double std_error = 0.0;
    double mean_contraction_factor = 0.0;
    std::vector<double> per_map_lipschitz;
    // Worst single-step expected log-stretch over a grid of window points;
    // complements the orbit average with a worst-point reading.
    double grid_max_step_log_norm = 0.0;
    StabilityVerdict verdict = StabilityVerdict::Indeterminate;
};

// Ergodic average of log spectral Jacobian norms along one random orbit.
// The first kLyapunovBurnIn steps are discarded before averaging.
LyapunovEstimate lyapunov_exponent(const RnifsSystem& sys, Point2 x0,
                                   std::size_t n, std::uint64_t seed);

double mean_contraction_factor(const RnifsSystem& sys, const Box2& window,
                               std::size_t n_samples, std::uint64_t seed);

StabilityReport stability_report(const RnifsSystem& sys, const Box2& window,
                                 std::size_t orbit_length, std::uint64_t seed);

std::string to_json(const StabilityReport& report);

inline constexpr std::size_t kLyapunovBurnIn = 100;
inline constexpr int kLipschitzSamplePairs = 512;
inline constexpr int kStabilityGridSide = 32;

}  // namespace rnifs

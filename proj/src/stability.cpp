#include "rnifs/stability.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "rnifs/errors.hpp"
#include "rnifs/maps.hpp"

namespace rnifs {

namespace {

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* verdict_name(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::ContractiveOnAverage: return "ContractiveOnAverage";
        case StabilityVerdict::Indeterminate: return "Indeterminate";
        case StabilityVerdict::ExpansiveOnAverage: return "ExpansiveOnAverage";
    }
    return "Indeterminate";
}

StabilityVerdict verdict_for(double estimate, double std_error) {
    if (estimate + 2.0 * std_error < 0.0)
        return StabilityVerdict::ContractiveOnAverage;
    if (estimate - 2.0 * std_error > 0.0)
        return StabilityVerdict::ExpansiveOnAverage;
    return StabilityVerdict::Indeterminate;
}

LyapunovEstimate lyapunov_exponent(const RnifsSystem& sys, Point2 x0,
                                   std::size_t n, std::uint64_t seed) {
    if (n < 100)
        throw ValidationError("lyapunov estimate needs at least 100 steps");
    if (!x0.finite()) throw ValidationError("non-finite start point");

    Xoshiro256ss rng(seed);
    Point2 x = x0;
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    const std::size_t total = kLyapunovBurnIn + n;
    for (std::size_t k = 0; k < total; ++k) {
        const std::size_t w = sample_index(sys.probs, rng);
        const MapDescriptor& m = sys.maps[w];
        if (k >= kLyapunovBurnIn) {
            const double s = jacobian_at(m, x).spectral_norm();
            if (s == 0.0) throw LogOfZeroError(k);
            // Welford running moments; exact for constant sequences.
            const double l = std::log(s);
            ++count;
            const double d = l - mean;
            mean += d / static_cast<double>(count);
            m2 += d * (l - mean);
        }
        x = eval_map(m, x);
        if (!x.finite() || norm(x) > kDivergenceRadius)
            throw DivergedError(k, "orbit left the divergence radius");
    }
    LyapunovEstimate est;
    est.estimate = mean;
    est.std_error = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) /
                                    std::sqrt(static_cast<double>(count))
                              : 0.0;
    return est;
}

double mean_contraction_factor(const RnifsSystem& sys, const Box2& window,
                               std::size_t n_samples, std::uint64_t seed) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i)
        acc += sys.probs[i] * estimate_lipschitz(sys.maps[i], window, n_samples,
                                                 derive_stream_seed(seed, i));
    return acc;
}

StabilityReport stability_report(const RnifsSystem& sys, const Box2& window,
                                 std::size_t orbit_length, std::uint64_t seed) {
    StabilityReport r;
    const LyapunovEstimate lyap =
        lyapunov_exponent(sys, kDefaultX0, orbit_length, seed);
    r.lyapunov_estimate = lyap.estimate;
    r.std_error = lyap.std_error;

    r.per_map_lipschitz.reserve(sys.size());
    double mcf = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const double s =
            estimate_lipschitz(sys.maps[i], window, kLipschitzSamplePairs,
                               derive_stream_seed(seed, 0x100 + i));
        r.per_map_lipschitz.push_back(s);
        mcf += sys.probs[i] * s;
    }
    r.mean_contraction_factor = mcf;

    // Worst expected one-step log stretch over grid cell centers. Cell
    // centers rather than corners keep symmetric singular points (like the
    // origin) off the sample set.
    double worst = -std::numeric_limits<double>::infinity();
    for (int gi = 0; gi < kStabilityGridSide; ++gi) {
        for (int gj = 0; gj < kStabilityGridSide; ++gj) {
            const Point2 p{
                window.xmin + (gi + 0.5) * window.width() / kStabilityGridSide,
                window.ymin + (gj + 0.5) * window.height() / kStabilityGridSide};
            double g = 0.0;
            for (std::size_t i = 0; i < sys.size(); ++i) {
                const double s = jacobian_at(sys.maps[i], p).spectral_norm();
                g += sys.probs[i] * std::log(s);
            }
            if (g > worst) worst = g;
        }
    }
    r.grid_max_step_log_norm = worst;

    r.verdict = verdict_for(r.lyapunov_estimate, r.std_error);
    return r;
}

std::string to_json(const StabilityReport& report) {
    std::string out = "{\n";
    out += "  \"lyapunov_estimate\": " + json_number(report.lyapunov_estimate) + ",\n";
    out += "  \"std_error\": " + json_number(report.std_error) + ",\n";
    out += "  \"mean_contraction_factor\": " +
           json_number(report.mean_contraction_factor) + ",\n";
    out += "  \"per_map_lipschitz\": [";
    for (std::size_t i = 0; i < report.per_map_lipschitz.size(); ++i) {
        if (i) out += ", ";
        out += json_number(report.per_map_lipschitz[i]);
    }
    out += "],\n";
    out += "  \"grid_max_step_log_norm\": " +
           json_number(report.grid_max_step_log_norm) + ",\n";
    out += "  \"verdict\": \"" + std::string(verdict_name(report.verdict)) + "\"\n";
    out += "}\n";
    return out;
}

}  // namespace rnifs

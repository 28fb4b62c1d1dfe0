#include "rnifs/system.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "rnifs/errors.hpp"

namespace rnifs {

namespace {

constexpr double kProbSumTolerance = 1e-12;
constexpr int kValidateLipschitzPairs = 512;
constexpr std::uint64_t kValidateLipschitzSeed = 0x5eedf00dULL;

// Standard gamma variate, Marsaglia & Tsang (2000). For alpha < 1 boosts to
// alpha + 1 and rescales by u^(1/alpha).
double gamma_sample(double alpha, Xoshiro256ss& rng) {
    if (alpha < 1.0) {
        const double u = rng.uniform01_open_low();
        return gamma_sample(alpha + 1.0, rng) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            // Box-Muller standard normal.
            const double u1 = rng.uniform01_open_low();
            const double u2 = rng.uniform01();
            x = std::sqrt(-2.0 * std::log(u1)) *
                std::cos(2.0 * 3.14159265358979323846 * u2);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01_open_low();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

ProbabilityVector ProbabilityVector::checked(std::vector<double> weights) {
    if (weights.empty())
        throw InvalidProbabilitiesError("probability vector is empty");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw InvalidProbabilitiesError("probabilities must be strictly positive");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > kProbSumTolerance)
        throw InvalidProbabilitiesError("probabilities sum to " + std::to_string(sum) +
                                        ", expected 1");
    return ProbabilityVector{std::move(weights)};
}

RnifsSystem make_system(const std::vector<std::string>& map_ids,
                        std::vector<double> probs) {
    std::vector<MapDescriptor> maps;
    maps.reserve(map_ids.size());
    for (const auto& id : map_ids) maps.push_back(lookup(id));
    auto pv = ProbabilityVector::checked(std::move(probs));
    if (maps.size() != pv.size())
        throw LengthMismatchError("system has " + std::to_string(maps.size()) +
                                  " maps but " + std::to_string(pv.size()) +
                                  " probabilities");
    return RnifsSystem{std::move(maps), std::move(pv)};
}

ValidationReport validate(const RnifsSystem& sys) {
    if (sys.maps.empty()) throw LengthMismatchError("system has no maps");
    if (sys.maps.size() != sys.probs.size())
        throw LengthMismatchError("system has " + std::to_string(sys.maps.size()) +
                                  " maps but " + std::to_string(sys.probs.size()) +
                                  " probabilities");
    ProbabilityVector::checked(sys.probs.p);

    ValidationReport report;
    report.n_maps = sys.maps.size();
    for (std::size_t i = 0; i < sys.maps.size(); ++i) {
        const double s = estimate_lipschitz(sys.maps[i], kReferenceWindow,
                                            kValidateLipschitzPairs,
                                            kValidateLipschitzSeed + i);
        report.per_map_lipschitz.push_back(s);
        report.mean_contraction_factor += sys.probs[i] * s;
    }
    report.contractive_on_window = report.mean_contraction_factor < 1.0;
    return report;
}

std::size_t sample_index(const ProbabilityVector& probs, Xoshiro256ss& rng) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) return i;
    }
    return probs.size() - 1;
}

PointCloud generate_orbit(const RnifsSystem& sys, Point2 x0, std::size_t total,
                          std::size_t burn_in, std::uint64_t seed) {
    if (total <= burn_in)
        throw ValidationError("total iterations must exceed burn-in");
    if (sys.maps.size() != sys.probs.size())
        throw LengthMismatchError("map/probability length mismatch");
    ProbabilityVector::checked(sys.probs.p);

    Xoshiro256ss rng(seed);
    PointCloud cloud;
    cloud.seed = seed;
    cloud.burn_in = burn_in;
    cloud.total_iterations = total;
    cloud.points.reserve(total - burn_in);

    // Digest ties the cloud to what produced it.
    {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xff;
                h *= 1099511628211ULL;
            }
        };
        auto mix_double = [&](double d) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(d));
            std::memcpy(&bits, &d, sizeof(bits));
            mix(bits);
        };
        for (const auto& m : sys.maps)
            for (char c : m.id) mix(static_cast<unsigned char>(c));
        for (double p : sys.probs.p) mix_double(p);
        mix_double(x0.x);
        mix_double(x0.y);
        mix(total);
        mix(burn_in);
        mix(seed);
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        cloud.config_digest = buf;
    }

    Point2 x = x0;
    for (std::size_t step = 0; step < total; ++step) {
        const std::size_t idx = sample_index(sys.probs, rng);
        x = sys.maps[idx].eval(x);
        if (!x.finite() || std::fabs(x.x) > kDivergenceRadius ||
            std::fabs(x.y) > kDivergenceRadius) {
            throw DivergedError(step, "map " + sys.maps[idx].id +
                                          " pushed the orbit out of bounds");
        }
        if (step >= burn_in) cloud.points.push_back(x);
    }
    return cloud;
}

ProbabilityVector dirichlet_probabilities(const std::vector<double>& alphas,
                                          Xoshiro256ss& rng) {
    if (alphas.empty()) throw InvalidAlphasError("alphas are empty");
    for (double a : alphas)
        if (!(a > 0.0) || !std::isfinite(a))
            throw InvalidAlphasError("alphas must be strictly positive");

    std::vector<double> g(alphas.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        // Floor keeps extreme draws from underflowing to an exact zero weight.
        g[i] = std::max(gamma_sample(alphas[i], rng), 1e-300);
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return ProbabilityVector::checked(std::move(g));
}

void write_points_csv(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "x,y\n";
    char line[80];
    for (const Point2& p : cloud.points) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", p.x, p.y);
        out << line;
    }
    if (!out) throw IoError("failed writing " + path.string());
}

PointCloud read_points_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y", 0) != 0)
        throw ParseError(path.string() + ": expected header 'x,y'");
    PointCloud cloud;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Point2 p;
        char trailing;
        if (std::sscanf(line.c_str(), "%lf,%lf%c", &p.x, &p.y, &trailing) != 2)
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": malformed point row");
        if (!p.finite())
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": non-finite point");
        cloud.points.push_back(p);
    }
    cloud.total_iterations = cloud.points.size();
    cloud.config_digest = "external:" + path.filename().string();
    return cloud;
}

}  // namespace rnifs

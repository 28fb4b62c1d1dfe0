#include "rnifs/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

namespace rnifs {

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr double kFlowEps = 1e-13;
constexpr double kTwoPi = 6.28318530717958647692;

double neumaier_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

struct Atom {
    Point2 p;
    double w;
};

// Collapses coincident support points, drops zero-weight atoms. Exact
// coordinate equality only; distance-0 merging is all wasserstein1_exact
// promises.
std::vector<Atom> merged_atoms(const EmpiricalMeasure& mu) {
    std::vector<Atom> atoms;
    atoms.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weights[i] > 0.0) atoms.push_back({mu.support[i], mu.weights[i]});
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
    });
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (!out.empty() && out.back().p == a.p)
            out.back().w += a.w;
        else
            out.push_back(a);
    }
    return out;
}

bool nearly_uniform(const std::vector<double>& weights) {
    const double ideal = 1.0 / static_cast<double>(weights.size());
    for (double w : weights)
        if (std::abs(w - ideal) > 1e-9 * ideal) return false;
    return true;
}

bool uniform_pair(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    return mu.size() == nu.size() && nearly_uniform(mu.weights) &&
           nearly_uniform(nu.weights);
}

// 1D W1 between sorted weighted samples: integral of |CDF_a - CDF_b| swept
// across the merged breakpoints.
double w1_line(const std::vector<std::pair<double, double>>& a,
               const std::vector<std::pair<double, double>>& b) {
    double cdfa = 0.0, cdfb = 0.0, cost = 0.0;
    double t_prev = std::min(a.front().first, b.front().first);
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() || ib < b.size()) {
        double t;
        if (ia < a.size() && (ib >= b.size() || a[ia].first <= b[ib].first))
            t = a[ia].first;
        else
            t = b[ib].first;
        cost += std::abs(cdfa - cdfb) * (t - t_prev);
        while (ia < a.size() && a[ia].first == t) cdfa += a[ia++].second;
        while (ib < b.size() && b[ib].first == t) cdfb += b[ib++].second;
        t_prev = t;
    }
    return cost;
}

std::vector<std::pair<double, double>> project(const EmpiricalMeasure& mu,
                                               double cx, double cy) {
    std::vector<std::pair<double, double>> line(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        line[i] = {cx * mu.support[i].x + cy * mu.support[i].y, mu.weights[i]};
    std::sort(line.begin(), line.end());
    return line;
}

bool exact_scope(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.size() + nu.size() <= kExactGeneralMaxCombined) return true;
    return uniform_pair(mu, nu) && mu.size() <= kExactUniformMaxPerSide;
}

}  // namespace

void EmpiricalMeasure::validate() const {
    if (support.size() != weights.size())
        throw LengthMismatchError("support and weight lengths differ");
    if (support.empty()) throw ValidationError("measure has empty support");
    for (const Point2& p : support)
        if (!p.finite()) throw ValidationError("non-finite support point");
    for (double w : weights)
        if (!(w >= 0.0)) throw ValidationError("negative or NaN weight");
    const double mass = neumaier_sum(weights);
    if (std::abs(mass - 1.0) > kMassTolerance)
        throw ValidationError("weights sum to " + std::to_string(mass) +
                              ", expected 1");
}

EmpiricalMeasure EmpiricalMeasure::dirac(Point2 p) {
    EmpiricalMeasure mu{{p}, {1.0}};
    mu.validate();
    return mu;
}

EmpiricalMeasure EmpiricalMeasure::uniform_on(std::vector<Point2> pts) {
    if (pts.empty()) throw ValidationError("uniform measure needs atoms");
    const double w = 1.0 / static_cast<double>(pts.size());
    EmpiricalMeasure mu{std::move(pts), std::vector<double>(0)};
    mu.weights.assign(mu.support.size(), w);
    mu.validate();
    return mu;
}

EmpiricalMeasure EmpiricalMeasure::weighted(std::vector<Point2> pts,
                                            std::vector<double> w) {
    EmpiricalMeasure mu{std::move(pts), std::move(w)};
    mu.validate();
    return mu;
}

NoConvergenceError::NoConvergenceError(std::size_t max_steps,
                                       EmpiricalMeasure last,
                                       ConvergenceTrace trace)
    : Error("no convergence after " + std::to_string(max_steps) + " steps"),
      max_steps_(max_steps),
      last_(std::move(last)),
      trace_(std::move(trace)) {}

EmpiricalMeasure pushforward(const EmpiricalMeasure& mu, const MapDescriptor& m) {
    mu.validate();
    EmpiricalMeasure out;
    out.support.reserve(mu.size());
    out.weights = mu.weights;
    for (const Point2& p : mu.support) out.support.push_back(eval_map(m, p));
    return out;
}

EmpiricalMeasure hutchinson_step(const RnifsSystem& sys,
                                 const EmpiricalMeasure& mu, std::size_t cap,
                                 Xoshiro256ss& rng) {
    mu.validate();
    if (cap < 1) throw InvalidCapError("support cap must be at least 1");

    EmpiricalMeasure mix;
    mix.support.reserve(sys.size() * mu.size());
    mix.weights.reserve(sys.size() * mu.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const double pi = sys.probs[i];
        for (std::size_t j = 0; j < mu.size(); ++j) {
            mix.support.push_back(eval_map(sys.maps[i], mu.support[j]));
            mix.weights.push_back(pi * mu.weights[j]);
        }
    }
    if (mix.size() <= cap) return mix;

    // Systematic resampling: one uniform offset, cap evenly spaced quantiles.
    EmpiricalMeasure out;
    out.support.reserve(cap);
    const double u0 = rng.uniform01();
    double cum = mix.weights[0];
    std::size_t idx = 0;
    for (std::size_t k = 0; k < cap; ++k) {
        const double target = (static_cast<double>(k) + u0) / static_cast<double>(cap);
        while (cum < target && idx + 1 < mix.size()) cum += mix.weights[++idx];
        out.support.push_back(mix.support[idx]);
    }
    out.weights.assign(cap, 1.0 / static_cast<double>(cap));
    return out;
}

namespace detail {

double solve_assignment(const std::vector<Point2>& a, const std::vector<Point2>& b) {
    const int n = static_cast<int>(a.size());
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost[static_cast<std::size_t>(i) * n + j] = distance(a[i], b[j]);

    // Shortest augmenting path assignment with row/column potentials.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur =
                    cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j)
        total += cost[static_cast<std::size_t>(p[j] - 1) * n + (j - 1)];
    return total / static_cast<double>(n);
}

double solve_transportation(const std::vector<Point2>& a,
                            const std::vector<double>& wa,
                            const std::vector<Point2>& b,
                            const std::vector<double>& wb) {
    const int m = static_cast<int>(a.size());
    const int n = static_cast<int>(b.size());
    const int nodes = m + n;
    const double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> cost(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            cost[static_cast<std::size_t>(i) * n + j] = distance(a[i], b[j]);

    // Normalize both sides to identical total mass so the program is feasible
    // even when the two inputs carry slightly different rounding.
    std::vector<double> supply = wa, demand = wb;
    const double sa = neumaier_sum(supply), sb = neumaier_sum(demand);
    for (double& w : supply) w /= sa;
    for (double& w : demand) w /= sb;

    std::vector<double> flow(static_cast<std::size_t>(m) * n, 0.0);
    std::vector<double> pot(nodes, 0.0), dist(nodes);
    std::vector<int> prev(nodes);
    std::vector<char> done(nodes);

    double remaining = 1.0;
    std::size_t budget = 100 * static_cast<std::size_t>(nodes) + 100;
    while (remaining > 1e-12) {
        if (budget-- == 0)
            throw Error("transportation solver exceeded its iteration budget");

        // Multi-source Dijkstra over the residual graph with reduced costs.
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(done.begin(), done.end(), 0);
        std::fill(prev.begin(), prev.end(), -1);
        for (int i = 0; i < m; ++i)
            if (supply[i] > kFlowEps) dist[i] = 0.0;
        for (int round = 0; round < nodes; ++round) {
            int u = -1;
            double best = kInf;
            for (int v = 0; v < nodes; ++v)
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = v;
                }
            if (u < 0) break;
            done[u] = 1;
            if (u < m) {
                for (int j = 0; j < n; ++j) {
                    const double rc = std::max(
                        0.0, cost[static_cast<std::size_t>(u) * n + j] + pot[u] - pot[m + j]);
                    if (dist[u] + rc < dist[m + j]) {
                        dist[m + j] = dist[u] + rc;
                        prev[m + j] = u;
                    }
                }
            } else {
                const int j = u - m;
                for (int i = 0; i < m; ++i) {
                    if (flow[static_cast<std::size_t>(i) * n + j] <= kFlowEps) continue;
                    const double rc = std::max(
                        0.0, -cost[static_cast<std::size_t>(i) * n + j] + pot[u] - pot[i]);
                    if (dist[u] + rc < dist[i]) {
                        dist[i] = dist[u] + rc;
                        prev[i] = u;
                    }
                }
            }
        }

        int target = -1;
        double best = kInf;
        for (int j = 0; j < n; ++j)
            if (demand[j] > kFlowEps && dist[m + j] < best) {
                best = dist[m + j];
                target = m + j;
            }
        if (target < 0) {
            if (remaining <= kMassTolerance) break;  // sub-tolerance residue
            throw Error("transportation solver found no augmenting path");
        }
        for (int v = 0; v < nodes; ++v) pot[v] += std::min(dist[v], best);

        double amount = demand[target - m];
        int source = target;
        for (int v = target; prev[v] >= 0; v = prev[v]) {
            if (v < m)  // reverse arc sink->source, bounded by existing flow
                amount = std::min(
                    amount, flow[static_cast<std::size_t>(v) * n + (prev[v] - m)]);
            source = prev[v];
        }
        amount = std::min(amount, supply[source]);
        for (int v = target; prev[v] >= 0; v = prev[v]) {
            if (v >= m)
                flow[static_cast<std::size_t>(prev[v]) * n + (v - m)] += amount;
            else
                flow[static_cast<std::size_t>(v) * n + (prev[v] - m)] -= amount;
        }
        supply[source] -= amount;
        demand[target - m] -= amount;
        remaining -= amount;
    }

    double total = 0.0;
    for (std::size_t k = 0; k < flow.size(); ++k)
        if (flow[k] > 0.0) total += flow[k] * cost[k];
    return total;
}

}  // namespace detail

double wasserstein1_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    mu.validate();
    nu.validate();

    // Equal-count uniform measures go straight to the assignment solver;
    // duplicate atoms are harmless there and merging could break uniformity.
    if (uniform_pair(mu, nu)) {
        if (mu.size() > kExactUniformMaxPerSide)
            throw SupportTooLargeError(
                "uniform supports exceed " + std::to_string(kExactUniformMaxPerSide) +
                " atoms per side; use the sliced estimator");
        return detail::solve_assignment(mu.support, nu.support);
    }

    const std::vector<Atom> am = merged_atoms(mu);
    const std::vector<Atom> an = merged_atoms(nu);
    if (am.size() + an.size() > kExactGeneralMaxCombined)
        throw SupportTooLargeError(
            "combined support exceeds " + std::to_string(kExactGeneralMaxCombined) +
            " atoms; use the sliced estimator");
    std::vector<Point2> pa(am.size()), pb(an.size());
    std::vector<double> va(am.size()), vb(an.size());
    for (std::size_t i = 0; i < am.size(); ++i) {
        pa[i] = am[i].p;
        va[i] = am[i].w;
    }
    for (std::size_t i = 0; i < an.size(); ++i) {
        pb[i] = an[i].p;
        vb[i] = an[i].w;
    }
    return detail::solve_transportation(pa, va, pb, vb);
}

double wasserstein1_sliced(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                           std::size_t n_projections, Xoshiro256ss& rng) {
    mu.validate();
    nu.validate();
    if (n_projections < 1)
        throw ValidationError("sliced estimator needs at least one projection");
    double acc = 0.0;
    for (std::size_t k = 0; k < n_projections; ++k) {
        const double angle = kTwoPi * rng.uniform01();
        const double cx = std::cos(angle), cy = std::sin(angle);
        acc += w1_line(project(mu, cx, cy), project(nu, cx, cy));
    }
    return acc / static_cast<double>(n_projections);
}

std::pair<EmpiricalMeasure, ConvergenceTrace> iterate_to_invariance(
    const RnifsSystem& sys, const EmpiricalMeasure& mu0, double tol,
    std::size_t max_steps, std::size_t cap, Xoshiro256ss& rng) {
    mu0.validate();
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (max_steps < 1) throw ValidationError("max_steps must be at least 1");

    ConvergenceTrace trace;
    trace.theoretical_factor = validate(sys).mean_contraction_factor;

    // One direction set shared by every sliced evaluation keeps the trace
    // ratios comparable across steps.
    const std::uint64_t projection_seed = rng.next();

    EmpiricalMeasure current = mu0;
    for (std::size_t step = 0; step < max_steps; ++step) {
        EmpiricalMeasure next = hutchinson_step(sys, current, cap, rng);
        double d;
        if (exact_scope(current, next)) {
            d = wasserstein1_exact(current, next);
        } else {
            Xoshiro256ss proj_rng(projection_seed);
            d = wasserstein1_sliced(current, next, kDefaultSlicedProjections,
                                    proj_rng);
        }
        if (!trace.step_distances.empty())
            trace.ratios.push_back(d / trace.step_distances.back());
        trace.step_distances.push_back(d);
        current = std::move(next);
        if (d < tol) return {std::move(current), std::move(trace)};
    }
    throw NoConvergenceError(max_steps, std::move(current), std::move(trace));
}

void write_measure_csv(const EmpiricalMeasure& mu,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "x,y,weight\n";
    char line[120];
    for (std::size_t i = 0; i < mu.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", mu.support[i].x,
                      mu.support[i].y, mu.weights[i]);
        out << line;
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void write_trace_csv(const ConvergenceTrace& trace,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "step,distance,ratio\n";
    char line[120];
    for (std::size_t i = 0; i < trace.step_distances.size(); ++i) {
        if (i == 0)
            std::snprintf(line, sizeof line, "%zu,%.17g,\n", i + 1,
                          trace.step_distances[i]);
        else
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i + 1,
                          trace.step_distances[i], trace.ratios[i - 1]);
        out << line;
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace rnifs

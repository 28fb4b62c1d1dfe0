#include "rnifs/maps.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "rnifs/errors.hpp"
#include "rnifs/rng.hpp"

namespace rnifs {

namespace {

constexpr double kSqrt3Over4 = 0.43301270189221932338;  // sqrt(3)/4

double sech2(double t) {
    const double th = std::tanh(t);
    return 1.0 - th * th;
}

// The map catalog. Nonlinear members f1..f12 cover quadratic, trigonometric,
// hyperbolic, and mixed couplings; each closed form is documented in
// docs/map_catalog.md. sier1..3 are the three corner similitudes of the unit
// triangle and sier_nl the oscillatory extension used by the case study.
std::vector<MapDescriptor> build_registry() {
    std::vector<MapDescriptor> maps;
    auto add = [&maps](std::string id, std::function<Point2(Point2)> eval,
                       std::function<Mat2(Point2)> jac, std::string description,
                       bool affine = false) {
        maps.push_back({std::move(id), std::move(eval), std::move(jac),
                        std::move(description), affine});
    };

    add(
        "f1", [](Point2 p) { return Point2{0.7 * p.x, 0.6 * p.y * p.y - 0.4}; },
        [](Point2 p) { return Mat2{0.7, 0.0, 0.0, 1.2 * p.y}; },
        "linear contraction in x, quadratic contraction along y");

    // Quadratic coefficients below are sized so that every bundled map mix
    // keeps [-2.5,2.5]^2 invariant; larger values open an escape channel
    // through repeated self-composition of the squared term.
    add(
        "f2",
        [](Point2 p) { return Point2{0.5 * p.x + 0.25, 0.4 * p.y * p.y - 0.3}; },
        [](Point2 p) { return Mat2{0.5, 0.0, 0.0, 0.8 * p.y}; },
        "shifted halving in x, squaring in the y component");

    add(
        "f3",
        [](Point2 p) {
            return Point2{0.9 * std::sin(p.y) + 0.1 * p.x, 0.9 * std::sin(p.x)};
        },
        [](Point2 p) {
            return Mat2{0.1, 0.9 * std::cos(p.y), 0.9 * std::cos(p.x), 0.0};
        },
        "cross-coupled sine terms");

    add(
        "f4",
        [](Point2 p) {
            return Point2{0.7 * std::sin(2.0 * p.x) - 0.3 * p.y,
                          0.7 * std::cos(2.0 * p.y) + 0.3 * p.x};
        },
        [](Point2 p) {
            return Mat2{1.4 * std::cos(2.0 * p.x), -0.3, 0.3,
                        -1.4 * std::sin(2.0 * p.y)};
        },
        "volatile double-frequency oscillator with rotation-like mixing");

    add(
        "f5",
        [](Point2 p) {
            return Point2{0.2 * p.x * p.x - 0.5 * p.y,
                          0.6 * p.y + 0.15 * p.x * p.x};
        },
        [](Point2 p) { return Mat2{0.4 * p.x, -0.5, 0.3 * p.x, 0.6}; },
        "x^2 and y interactions producing curved folds");

    add(
        "f6",
        [](Point2 p) {
            return Point2{0.6 * (p.x + p.y), 0.9 * std::tanh(p.x - p.y)};
        },
        [](Point2 p) {
            const double s = 0.9 * sech2(p.x - p.y);
            return Mat2{0.6, 0.6, s, -s};
        },
        "diagonal stretching with hyperbolic saturation");

    add(
        "f7",
        [](Point2 p) {
            return Point2{0.28 * std::sinh(p.x) - 0.3 * p.y,
                          0.8 * std::sin(2.0 * p.y) + 0.2 * p.x};
        },
        [](Point2 p) {
            return Mat2{0.28 * std::cosh(p.x), -0.3, 0.2,
                        1.6 * std::cos(2.0 * p.y)};
        },
        "hyperbolic-sine growth in x against a sine feedback in y");

    add(
        "f8",
        [](Point2 p) {
            return Point2{std::sin(p.x * p.y) - std::cos(p.y),
                          std::sin(p.y * p.y + p.x)};
        },
        [](Point2 p) {
            const double cxy = std::cos(p.x * p.y);
            const double cyx = std::cos(p.y * p.y + p.x);
            return Mat2{p.y * cxy, p.x * cxy + std::sin(p.y), cyx, 2.0 * p.y * cyx};
        },
        "strong local oscillations through sin(xy) and sin(y^2+x)");

    add(
        "f9",
        [](Point2 p) {
            return Point2{0.9 * std::cos(2.0 * p.y) + 0.2 * p.x,
                          0.9 * std::sin(3.0 * p.x) - 0.2 * p.y};
        },
        [](Point2 p) {
            return Mat2{0.2, -1.8 * std::sin(2.0 * p.y), 2.7 * std::cos(3.0 * p.x),
                        -0.2};
        },
        "mixed-frequency trigonometric member");

    add(
        "f10",
        [](Point2 p) {
            return Point2{0.6 * (p.x * p.x - p.y * p.y) + 0.2, 1.2 * p.x * p.y};
        },
        [](Point2 p) {
            return Mat2{1.2 * p.x, -1.2 * p.y, 1.2 * p.y, 1.2 * p.x};
        },
        "radial geometry via squared terms (complex-square-like)");

    add(
        "f11",
        [](Point2 p) {
            return Point2{0.9 * std::sin(3.0 * p.x) + 0.1 * p.y,
                          0.9 * std::tanh(p.x + p.y)};
        },
        [](Point2 p) {
            const double s = 0.9 * sech2(p.x + p.y);
            return Mat2{2.7 * std::cos(3.0 * p.x), 0.1, s, s};
        },
        "high-frequency sin(3x) with tanh(x+y) saturation");

    add(
        "f12",
        [](Point2 p) {
            return Point2{0.9 * std::sin(p.x) * std::cos(p.y),
                          0.9 * std::sin(p.y) * std::cos(p.x)};
        },
        [](Point2 p) {
            return Mat2{0.9 * std::cos(p.x) * std::cos(p.y),
                        -0.9 * std::sin(p.x) * std::sin(p.y),
                        -0.9 * std::sin(p.y) * std::sin(p.x),
                        0.9 * std::cos(p.y) * std::cos(p.x)};
        },
        "multiplicative sinusoidal interactions");

    auto half_identity = [](Point2) { return Mat2{0.5, 0.0, 0.0, 0.5}; };

    add(
        "sier1", [](Point2 p) { return Point2{0.5 * p.x, 0.5 * p.y}; },
        half_identity, "triangle similitude toward (0,0), ratio 1/2", true);
    add(
        "sier2", [](Point2 p) { return Point2{0.5 * p.x + 0.5, 0.5 * p.y}; },
        half_identity, "triangle similitude toward (1,0), ratio 1/2", true);
    add(
        "sier3",
        [](Point2 p) { return Point2{0.5 * p.x + 0.25, 0.5 * p.y + kSqrt3Over4}; },
        half_identity, "triangle similitude toward the apex, ratio 1/2", true);

    add(
        "sier_nl",
        [](Point2 p) {
            constexpr double pi = 3.14159265358979323846;
            return Point2{std::sin(pi * p.x) * p.y, std::cos(pi * p.y) * p.x};
        },
        [](Point2 p) {
            constexpr double pi = 3.14159265358979323846;
            return Mat2{pi * std::cos(pi * p.x) * p.y, std::sin(pi * p.x),
                        std::cos(pi * p.y), -pi * std::sin(pi * p.y) * p.x};
        },
        "oscillatory nonlinear extension of the triangle system");

    return maps;
}

Mat2 finite_difference_jacobian(const MapDescriptor& m, Point2 p) {
    const double hx = 1e-6 * std::max(1.0, std::fabs(p.x));
    const double hy = 1e-6 * std::max(1.0, std::fabs(p.y));
    const Point2 fxp = m.eval({p.x + hx, p.y});
    const Point2 fxm = m.eval({p.x - hx, p.y});
    const Point2 fyp = m.eval({p.x, p.y + hy});
    const Point2 fym = m.eval({p.x, p.y - hy});
    return Mat2{(fxp.x - fxm.x) / (2.0 * hx), (fyp.x - fym.x) / (2.0 * hy),
                (fxp.y - fxm.y) / (2.0 * hx), (fyp.y - fym.y) / (2.0 * hy)};
}

}  // namespace

const std::vector<MapDescriptor>& registered_maps() {
    static const std::vector<MapDescriptor> registry = build_registry();
    return registry;
}

const MapDescriptor& lookup(const std::string& id) {
    static const auto index = [] {
        std::unordered_map<std::string, const MapDescriptor*> idx;
        for (const auto& m : registered_maps()) idx.emplace(m.id, &m);
        return idx;
    }();
    const auto it = index.find(id);
    if (it == index.end()) throw UnknownMapError(id);
    return *it->second;
}

Point2 eval_map(const MapDescriptor& m, Point2 p) {
    const Point2 out = m.eval(p);
    if (!out.finite())
        throw NonFiniteResultError("map " + m.id + " produced a non-finite value");
    return out;
}

Mat2 jacobian_at(const MapDescriptor& m, Point2 p) {
    const Mat2 j = m.has_analytic_jacobian() ? m.jacobian(p)
                                             : finite_difference_jacobian(m, p);
    if (!j.finite())
        throw NonFiniteResultError("Jacobian of " + m.id + " is non-finite");
    return j;
}

double estimate_lipschitz(const MapDescriptor& m, const Box2& window, int n_pairs,
                          std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    auto sample = [&] {
        return Point2{rng.uniform(window.xmin, window.xmax),
                      rng.uniform(window.ymin, window.ymax)};
    };

    double best = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        const Point2 p = sample();
        const Point2 q = sample();
        const double d = distance(p, q);
        if (d == 0.0) continue;
        best = std::max(best, distance(eval_map(m, p), eval_map(m, q)) / d);
    }
    for (int i = 0; i < n_pairs; ++i) {
        best = std::max(best, jacobian_at(m, sample()).spectral_norm());
    }
    return best;
}

}  // namespace rnifs

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rnifs/geometry.hpp"

namespace rnifs {

// A named 2D transformation with an optional analytic Jacobian.
// Descriptors are immutable after registration and safe to share across
// threads; eval and jacobian are pure functions.
struct MapDescriptor {
    std::string id;
    std::function<Point2(Point2)> eval;
    std::function<Mat2(Point2)> jacobian;  // empty: fall back to finite differences
    std::string description;
    bool is_affine = false;

    bool has_analytic_jacobian() const { return static_cast<bool>(jacobian); }
};

// Registry access. Registered ids: f1..f12 plus the triangle case-study
// maps sier1, sier2, sier3 and the nonlinear extension sier_nl.
// Throws UnknownMapError for anything else.
const MapDescriptor& lookup(const std::string& id);
const std::vector<MapDescriptor>& registered_maps();

// f(p). Throws NonFiniteResultError if an output coordinate is NaN/Inf.
Point2 eval_map(const MapDescriptor& m, Point2 p);

// Analytic Jacobian when present, otherwise central finite differences with
// step h = 1e-6 * max(1, |coordinate|) per axis.
Mat2 jacobian_at(const MapDescriptor& m, Point2 p);

// Empirical Lipschitz estimate over a window: max stretch |f(p)-f(q)|/|p-q|
// over n_pairs sampled point pairs, combined with the max Jacobian spectral
// norm over n_pairs sampled points. A lower bound on the true constant.
// Deterministic for a given seed.
double estimate_lipschitz(const MapDescriptor& m, const Box2& window, int n_pairs,
                          std::uint64_t seed);

// Window the map library was calibrated on; default for Lipschitz scans.
inline constexpr Box2 kReferenceWindow{-3.0, 3.0, -3.0, 3.0};

}  // namespace rnifs

#pragma once

#include <cmath>

namespace rnifs {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 p) { return std::sqrt(p.x * p.x + p.y * p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// Row-major 2x2 matrix, used for Jacobians.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    bool finite() const {
        return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) &&
               std::isfinite(a22);
    }

    // Operator 2-norm (largest singular value), closed form:
    // singular values satisfy s1^2 + s2^2 = tr(A^T A) and s1 * s2 = |det A|.
    double spectral_norm() const {
        const double t = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
        const double d = a11 * a22 - a12 * a21;
        const double disc = t * t - 4.0 * d * d;
        return std::sqrt(0.5 * (t + std::sqrt(disc > 0.0 ? disc : 0.0)));
    }
};

struct Box2 {
    double xmin = 0.0, xmax = 0.0;
    double ymin = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool degenerate() const { return !(xmax > xmin) || !(ymax > ymin); }
    bool contains(Point2 p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
};

}  // namespace rnifs

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "rnifs/errors.hpp"
#include "rnifs/maps.hpp"
#include "rnifs/rng.hpp"
#include "rnifs/system.hpp"

using namespace rnifs;

namespace {

RnifsSystem triangle_system() {
    return make_system({"sier1", "sier2", "sier3"},
                       {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

// Signed area test against each triangle edge; tol is Euclidean dilation
// (edges have unit length, so the cross product is a distance).
bool in_dilated_triangle(Point2 p, double tol) {
    const Point2 a{0.0, 0.0}, b{1.0, 0.0}, c{0.5, std::sqrt(3.0) / 2.0};
    auto cross = [](Point2 u, Point2 v) { return u.x * v.y - u.y * v.x; };
    return cross(b - a, p - a) >= -tol && cross(c - b, p - b) >= -tol &&
           cross(a - c, p - c) >= -tol;
}

std::filesystem::path temp_file(const char* stem) {
    return std::filesystem::temp_directory_path() /
           (std::string(stem) + "_" + std::to_string(::getpid()) + ".csv");
}

}  // namespace

TEST_CASE("probability vector invariants") {
    CHECK_NOTHROW(ProbabilityVector::checked({0.5, 0.3, 0.2}));
    CHECK_NOTHROW(ProbabilityVector::checked({1.0}));
    CHECK_THROWS_AS(ProbabilityVector::checked({0.5, 0.5, 0.1}),
                    InvalidProbabilitiesError);
    CHECK_THROWS_AS(ProbabilityVector::checked({0.5, 0.5, 0.0}),
                    InvalidProbabilitiesError);
    CHECK_THROWS_AS(ProbabilityVector::checked({1.2, -0.2}),
                    InvalidProbabilitiesError);
    CHECK_THROWS_AS(ProbabilityVector::checked({}), InvalidProbabilitiesError);
    // Sum tolerance is 1e-12: barely-off sums are accepted, clearly-off not.
    CHECK_NOTHROW(ProbabilityVector::checked({0.5, 0.5 + 5e-13}));
    CHECK_THROWS_AS(ProbabilityVector::checked({0.5, 0.5 + 1e-9}),
                    InvalidProbabilitiesError);
}

TEST_CASE("make_system validates ids and shapes") {
    const RnifsSystem sys = make_system({"f1", "f2"}, {0.7, 0.3});
    CHECK(sys.size() == 2);
    CHECK(sys.maps[0].id == "f1");
    CHECK(sys.probs[1] == 0.3);
    CHECK_THROWS_AS(make_system({"f99"}, {1.0}), UnknownMapError);
    CHECK_THROWS_AS(make_system({"f1", "f2"}, {1.0}), LengthMismatchError);
    CHECK_THROWS_AS(make_system({"f1"}, {0.5, 0.5}), LengthMismatchError);
}

TEST_CASE("validate reports contraction data for similitude systems") {
    const ValidationReport rep = validate(triangle_system());
    CHECK(rep.n_maps == 3);
    REQUIRE(rep.per_map_lipschitz.size() == 3);
    for (double s : rep.per_map_lipschitz)
        CHECK(s == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rep.mean_contraction_factor == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rep.contractive_on_window);
}

TEST_CASE("sample_index respects the weights") {
    Xoshiro256ss rng(42);
    const auto sure = ProbabilityVector::checked({1.0});
    for (int i = 0; i < 1000; ++i) CHECK(sample_index(sure, rng) == 0);

    const auto even = ProbabilityVector::checked({0.5, 0.5});
    std::size_t ones = 0;
    const std::size_t n = 1000000;
    Xoshiro256ss rng42(42);
    for (std::size_t i = 0; i < n; ++i) ones += sample_index(even, rng42);
    const double freq = static_cast<double>(ones) / n;
    CHECK(freq >= 0.498);
    CHECK(freq <= 0.502);

    const auto skew = ProbabilityVector::checked({0.6, 0.2, 0.2});
    std::size_t counts[3] = {0, 0, 0};
    Xoshiro256ss rng7(7);
    for (std::size_t i = 0; i < n; ++i) ++counts[sample_index(skew, rng7)];
    for (std::size_t k = 0; k < 3; ++k) {
        const double p = skew[k];
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        const double observed = static_cast<double>(counts[k]) / n;
        CHECK(std::fabs(observed - p) <= 3.0 * sigma);
    }
}

TEST_CASE("orbit of the halving map is the exact dyadic sequence") {
    const RnifsSystem sys = make_system({"sier1"}, {1.0});
    const PointCloud cloud = generate_orbit(sys, {1.0, 1.0}, 4, 0, 99);
    REQUIRE(cloud.size() == 4);
    const Point2 expect[4] = {
        {0.5, 0.5}, {0.25, 0.25}, {0.125, 0.125}, {0.0625, 0.0625}};
    for (int i = 0; i < 4; ++i) {
        CHECK(cloud.points[i].x == expect[i].x);
        CHECK(cloud.points[i].y == expect[i].y);
    }
    CHECK(cloud.burn_in == 0);
    CHECK(cloud.total_iterations == 4);
}

TEST_CASE("triangle orbit stays inside the dilated attractor hull") {
    const PointCloud cloud =
        generate_orbit(triangle_system(), {0.1, 0.1}, 100000, 100, 42);
    CHECK(cloud.size() == 100000 - 100);
    for (const Point2& p : cloud.points) CHECK(in_dilated_triangle(p, 1e-9));
}

TEST_CASE("orbits are reproducible for a fixed seed") {
    const RnifsSystem sys = make_system({"f3", "f7", "f11"}, {0.4, 0.3, 0.3});
    const PointCloud a = generate_orbit(sys, kDefaultX0, 20000, 500, 7);
    const PointCloud b = generate_orbit(sys, kDefaultX0, 20000, 500, 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points[i].x == b.points[i].x);
        CHECK(a.points[i].y == b.points[i].y);
    }
    CHECK(a.config_digest == b.config_digest);
    const PointCloud c = generate_orbit(sys, kDefaultX0, 20000, 500, 8);
    CHECK(c.config_digest != a.config_digest);
}

TEST_CASE("single contraction converges monotonically to its fixed point") {
    // f(p) = 0.4 R(0.3) p + (1, 0.5): similitude with ratio 0.4.
    const double th = 0.3, s = 0.4;
    const double c = s * std::cos(th), d = s * std::sin(th);
    MapDescriptor m{"spin",
                    [=](Point2 p) {
                        return Point2{c * p.x - d * p.y + 1.0,
                                      d * p.x + c * p.y + 0.5};
                    },
                    [=](Point2) {
                        return Mat2{c, -d, d, c};
                    },
                    "contractive rotation", true};
    // Fixed point solves (I - A) x = t.
    const double a11 = 1.0 - c, a12 = d, a21 = -d, a22 = 1.0 - c;
    const double det = a11 * a22 - a12 * a21;
    const Point2 fix{(1.0 * a22 - 0.5 * a12) / det,
                     (0.5 * a11 - 1.0 * a21) / det};

    RnifsSystem sys{{m}, ProbabilityVector::checked({1.0})};
    const PointCloud cloud = generate_orbit(sys, {5.0, -3.0}, 60, 0, 1);
    double prev = distance({5.0, -3.0}, fix);
    for (const Point2& p : cloud.points) {
        const double cur = distance(p, fix);
        // Every computed step carries ~1e-15 of absolute rounding noise, so
        // the per-step ratio is only exact well above that floor and the
        // tolerance widens as the orbit closes in.
        if (prev > 1e-12) {
            CHECK(std::fabs(cur / prev - s) <= 1e-12 + 1e-13 / prev);
            CHECK(cur <= prev);
        }
        prev = cur;
    }
    const Point2 last = cloud.points.back();
    CHECK(distance(last, fix) <= 1e-12 * std::max(1.0, norm(fix)));
}

TEST_CASE("escape past the divergence radius raises with the step index") {
    MapDescriptor grow{"grow",
                       [](Point2 p) { return Point2{3.0 * p.x + 1.0, 3.0 * p.y}; },
                       [](Point2) {
                           return Mat2{3.0, 0.0, 0.0, 3.0};
                       },
                       "expanding", true};
    RnifsSystem sys{{grow}, ProbabilityVector::checked({1.0})};
    // x: 1 -> 4 -> 13 -> 40 -> 121, leaving |x| <= 100 at step index 3.
    bool threw = false;
    try {
        generate_orbit(sys, {1.0, 1.0}, 1000, 0, 5);
    } catch (const DivergedError& e) {
        threw = true;
        CHECK(e.step == 3);
    }
    CHECK(threw);
}

TEST_CASE("orbit shape arguments are validated") {
    const RnifsSystem sys = make_system({"sier1"}, {1.0});
    CHECK_THROWS_AS(generate_orbit(sys, {0.0, 0.0}, 100, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(generate_orbit(sys, {0.0, 0.0}, 50, 100, 1),
                    ValidationError);
}

TEST_CASE("dirichlet sampling concentrates and normalizes") {
    Xoshiro256ss rng(11);
    const auto sharp = dirichlet_probabilities({1e6, 1e6}, rng);
    CHECK(std::fabs(sharp[0] - 0.5) <= 0.01);
    CHECK(std::fabs(sharp[1] - 0.5) <= 0.01);

    const auto point = dirichlet_probabilities({3.7}, rng);
    CHECK(point.size() == 1);
    CHECK(point[0] == 1.0);

    double mean[3] = {0.0, 0.0, 0.0};
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto v = dirichlet_probabilities({1.0, 1.0, 1.0}, rng);
        double sum = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            mean[k] += v[k];
            sum += v[k];
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
    for (double& m : mean) m /= draws;
    for (double m : mean) CHECK(std::fabs(m - 1.0 / 3.0) <= 0.02);

    CHECK_THROWS_AS(dirichlet_probabilities({}, rng), InvalidAlphasError);
    CHECK_THROWS_AS(dirichlet_probabilities({1.0, 0.0}, rng),
                    InvalidAlphasError);
    CHECK_THROWS_AS(dirichlet_probabilities({1.0, -2.0}, rng),
                    InvalidAlphasError);
}

TEST_CASE("dirichlet draws are reproducible per seed") {
    Xoshiro256ss a(123), b(123);
    const auto va = dirichlet_probabilities({2.0, 3.0, 4.0}, a);
    const auto vb = dirichlet_probabilities({2.0, 3.0, 4.0}, b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(va[i] == vb[i]);
}

TEST_CASE("points csv round-trips exactly") {
    const PointCloud cloud =
        generate_orbit(triangle_system(), {0.1, 0.1}, 2000, 100, 3);
    const auto path = temp_file("points_roundtrip");
    write_points_csv(cloud, path);
    const PointCloud back = read_points_csv(path);
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(back.points[i].x == cloud.points[i].x);
        CHECK(back.points[i].y == cloud.points[i].y);
    }
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_points_csv(path), IoError);
}

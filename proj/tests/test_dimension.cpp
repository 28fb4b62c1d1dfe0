#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rnifs/dimension.hpp"
#include "rnifs/errors.hpp"
#include "rnifs/maps.hpp"
#include "rnifs/rng.hpp"
#include "rnifs/system.hpp"

using namespace rnifs;

namespace {

PointCloud cloud_of(std::vector<Point2> pts) {
    PointCloud c;
    c.points = std::move(pts);
    c.total_iterations = c.points.size();
    return c;
}

PointCloud triangle_cloud(std::uint64_t seed) {
    const RnifsSystem sys = make_system({"sier1", "sier2", "sier3"},
                                        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    return generate_orbit(sys, kDefaultX0, 100000, 100, seed);
}

PointCloud square_cloud(std::size_t n, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    std::vector<Point2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back({rng.uniform01(), rng.uniform01()});
    return cloud_of(std::move(pts));
}

PointCloud segment_cloud(std::size_t n, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    std::vector<Point2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform01(), 0.5});
    return cloud_of(std::move(pts));
}

std::filesystem::path temp_file(const char* stem) {
    return std::filesystem::temp_directory_path() /
           (std::string(stem) + "_" + std::to_string(::getpid()) + ".csv");
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

}  // namespace

TEST_CASE("box counts on a hand-enumerable lattice") {
    std::vector<Point2> pts;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            pts.push_back({(i + 0.5) / 4.0, (j + 0.5) / 4.0});
    const BoxCountSeries s = box_counts(cloud_of(pts), 4);
    REQUIRE(s.counts.size() == 4);
    CHECK(s.counts[0] == 4);    // 2x2 grid over the 16 lattice points
    CHECK(s.counts[1] == 16);   // 4x4 grid isolates every point
    CHECK(s.counts[2] == 16);
    CHECK(s.counts[3] == 16);
    CHECK(s.n_points == 16);
    for (std::size_t i = 1; i < s.epsilons.size(); ++i) {
        CHECK(s.epsilons[i] < s.epsilons[i - 1]);
        CHECK(s.counts[i] >= s.counts[i - 1]);
    }
}

TEST_CASE("box counts validate their inputs") {
    CHECK_THROWS_AS(box_counts(PointCloud{}, 12), EmptyCloudError);
    CHECK_THROWS_AS(box_counts(cloud_of({{0, 0}}), 2), ValidationError);
}

TEST_CASE("a repeated point occupies one cell at every scale") {
    const PointCloud one = cloud_of(std::vector<Point2>(100000, {0.3, 0.8}));
    const BoxCountSeries s = box_counts(one, kDefaultBoxLevels);
    for (std::size_t c : s.counts) CHECK(c == 1);
    const DimensionEstimate est = fit_dimension(s);
    CHECK(est.value == 0.0);
    CHECK(est.r_squared == 1.0);
}

TEST_CASE("segment covering count doubles per halving") {
    const PointCloud seg = segment_cloud(100000, 321);
    const BoxCountSeries s = box_counts(seg, kDefaultBoxLevels);
    for (int k = 1; k <= 10; ++k)
        CHECK(s.counts[k - 1] == (1ULL << k));
}

TEST_CASE("fit on exact dyadic data is a perfect line") {
    BoxCountSeries s;
    s.n_points = 1000000;
    for (int k = 1; k <= 12; ++k) {
        s.epsilons.push_back(1.0 / static_cast<double>(1ULL << k));
        s.counts.push_back(1ULL << k);
    }
    const DimensionEstimate est = fit_dimension(s);
    CHECK(std::fabs(est.value - 1.0) <= 1e-12);
    CHECK(std::fabs(est.r_squared - 1.0) <= 1e-12);
    CHECK(est.estimator == DimensionEstimator::Box);
    // Window keeps 10 <= N <= 10^5: scales k = 4..12.
    CHECK(est.window_max_eps == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(est.window_min_eps == doctest::Approx(1.0 / 4096.0).epsilon(1e-12));
}

TEST_CASE("too few usable scales is an error, not a guess") {
    BoxCountSeries s;
    s.n_points = 1000000;
    for (int k = 1; k <= 3; ++k) {
        s.epsilons.push_back(1.0 / static_cast<double>(1ULL << k));
        s.counts.push_back(2);  // below the N >= 10 guard
    }
    CHECK_THROWS_AS(fit_dimension(s), InsufficientScalesError);
}

TEST_CASE("reference clouds hit their known dimensions") {
    const PointCloud sier = triangle_cloud(42);
    const DimensionEstimate box = fit_dimension(box_counts(sier, kDefaultBoxLevels));
    CHECK(std::fabs(box.value - kLog3 / kLog2) <= 0.05);
    CHECK(box.r_squared >= 0.99);

    const PointCloud square = square_cloud(200000, 123);
    const DimensionEstimate sq = fit_dimension(box_counts(square, kDefaultBoxLevels));
    CHECK(std::fabs(sq.value - 2.0) <= 0.05);

    const PointCloud segment = segment_cloud(100000, 321);
    const DimensionEstimate sg = fit_dimension(box_counts(segment, kDefaultBoxLevels));
    CHECK(std::fabs(sg.value - 1.0) <= 0.03);
}

TEST_CASE("information dimension tracks box dimension on references") {
    const DimensionEstimate sier =
        information_dimension(triangle_cloud(42), kDefaultBoxLevels);
    CHECK(std::fabs(sier.value - kLog3 / kLog2) <= 0.08);
    CHECK(sier.estimator == DimensionEstimator::Information);

    const DimensionEstimate sq =
        information_dimension(square_cloud(200000, 123), kDefaultBoxLevels);
    CHECK(std::fabs(sq.value - 2.0) <= 0.1);

    const DimensionEstimate one = information_dimension(
        cloud_of(std::vector<Point2>(100000, {0.3, 0.8})), kDefaultBoxLevels);
    CHECK(one.value == 0.0);
    CHECK(one.r_squared == 1.0);
}

TEST_CASE("correlation dimension from sampled pair statistics") {
    const PointCloud sier = triangle_cloud(42);
    const DimensionEstimate sc =
        correlation_dimension(sier, default_radii(sier), kDefaultMaxPairs, 1);
    CHECK(std::fabs(sc.value - kLog3 / kLog2) <= 0.08);
    CHECK(sc.estimator == DimensionEstimator::Correlation);

    const PointCloud square = square_cloud(200000, 123);
    const DimensionEstimate sq =
        correlation_dimension(square, default_radii(square), kDefaultMaxPairs, 2);
    CHECK(std::fabs(sq.value - 2.0) <= 0.1);

    const PointCloud segment = segment_cloud(100000, 321);
    const DimensionEstimate sg = correlation_dimension(
        segment, default_radii(segment), kDefaultMaxPairs, 3);
    CHECK(std::fabs(sg.value - 1.0) <= 0.05);

    const PointCloud one = cloud_of(std::vector<Point2>(100000, {0.3, 0.8}));
    const DimensionEstimate pt =
        correlation_dimension(one, default_radii(one), kDefaultMaxPairs, 4);
    CHECK(pt.value == 0.0);
}

TEST_CASE("correlation estimator rejects unusable inputs") {
    const PointCloud square = square_cloud(1000, 55);
    CHECK_THROWS_AS(correlation_dimension(square_cloud(99, 1),
                                          default_radii(square), 100000, 1),
                    ValidationError);
    // Radii far above the cloud diameter give C(r) = 1 everywhere: no scale
    // survives the correlation window.
    CHECK_THROWS_AS(
        correlation_dimension(square, {1000.0, 900.0, 800.0}, 100000, 1),
        InsufficientScalesError);
}

TEST_CASE("grid re-anchoring jitter stays within the documented bound") {
    const PointCloud sier = triangle_cloud(42);
    const double base =
        fit_dimension(box_counts(sier, kDefaultBoxLevels)).value;

    PointCloud shifted = sier;
    for (Point2& p : shifted.points) {
        p.x += 13.7;
        p.y -= 4.2;
    }
    const double moved =
        fit_dimension(box_counts(shifted, kDefaultBoxLevels)).value;
    CHECK(std::fabs(moved - base) <= 0.02);

    PointCloud scaled = sier;
    for (Point2& p : scaled.points) {
        p.x *= 10.0;
        p.y *= 10.0;
    }
    const double bigger =
        fit_dimension(box_counts(scaled, kDefaultBoxLevels)).value;
    CHECK(std::fabs(bigger - base) <= 0.02);
}

TEST_CASE("all estimators stay inside the planar envelope") {
    const PointCloud clouds[] = {triangle_cloud(7), square_cloud(50000, 9),
                                 segment_cloud(50000, 13)};
    for (const PointCloud& c : clouds) {
        const double b = fit_dimension(box_counts(c, kDefaultBoxLevels)).value;
        const double i = information_dimension(c, kDefaultBoxLevels).value;
        const double r =
            correlation_dimension(c, default_radii(c), kDefaultMaxPairs, 5).value;
        for (double v : {b, i, r}) {
            CHECK(v >= 0.0);
            CHECK(v <= 2.1);
        }
    }
}

TEST_CASE("similarity bound in both orientations") {
    const auto third = ProbabilityVector::checked(
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    const std::vector<double> halves{0.5, 0.5, 0.5};
    CHECK(std::fabs(similarity_bound(third, halves) - kLog3 / kLog2) <= 1e-12);
    CHECK(std::fabs(similarity_bound(third, halves, true) - kLog2 / kLog3) <=
          1e-12);

    const auto single = ProbabilityVector::checked({1.0});
    CHECK(similarity_bound(single, {0.5}) == 0.0);
    CHECK_THROWS_AS(similarity_bound(single, {0.5}, true), DomainError);

    const auto half = ProbabilityVector::checked({0.5, 0.5});
    CHECK(std::fabs(similarity_bound(half, {0.5, 0.5}) - 1.0) <= 1e-12);
}

TEST_CASE("similarity bound rejects out-of-range parameters") {
    const auto half = ProbabilityVector::checked({0.5, 0.5});
    CHECK_THROWS_AS(similarity_bound(half, {0.5}), DomainError);
    CHECK_THROWS_AS(similarity_bound(half, {0.5, 1.0}), DomainError);
    CHECK_THROWS_AS(similarity_bound(half, {0.5, 0.0}), DomainError);
    CHECK_THROWS_AS(similarity_bound(half, {0.5, -0.3}), DomainError);
}

TEST_CASE("uniform equal-ratio families obey the closed form") {
    for (int n = 2; n <= 5; ++n) {
        const auto probs = ProbabilityVector::checked(
            std::vector<double>(n, 1.0 / static_cast<double>(n)));
        for (double s : {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
            const std::vector<double> ratios(n, s);
            const double want = std::log(static_cast<double>(n)) /
                                std::log(1.0 / s);
            CHECK(std::fabs(similarity_bound(probs, ratios) - want) <= 1e-12);
        }
    }
}

TEST_CASE("entropy series is consistent with its estimator") {
    const PointCloud square = square_cloud(100000, 17);
    const EntropySeries es = entropy_series(square, 8);
    REQUIRE(es.epsilons.size() == 8);
    REQUIRE(es.entropies.size() == 8);
    for (std::size_t i = 0; i < es.entropies.size(); ++i) {
        CHECK(es.entropies[i] >= 0.0);
        if (i > 0) CHECK(es.entropies[i] >= es.entropies[i - 1] - 1e-12);
        // Entropy over N occupied cells is at most ln N.
        CHECK(es.entropies[i] <=
              std::log(static_cast<double>(es.counts[i])) + 1e-12);
    }

    const PointCloud one = cloud_of(std::vector<Point2>(200, {0.1, 0.1}));
    const EntropySeries zero = entropy_series(one, 5);
    for (double h : zero.entropies) CHECK(h == 0.0);
}

TEST_CASE("default radius ladder is positive and decreasing") {
    const PointCloud square = square_cloud(5000, 21);
    const std::vector<double> radii = default_radii(square);
    REQUIRE(radii.size() >= 3);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        CHECK(radii[i] > 0.0);
        if (i > 0) CHECK(radii[i] < radii[i - 1]);
    }
}

TEST_CASE("estimates serialize to json with the agreed fields") {
    const PointCloud sier = triangle_cloud(3);
    const DimensionEstimate est =
        fit_dimension(box_counts(sier, kDefaultBoxLevels));
    const std::string js = to_json(est);
    for (const char* key : {"\"estimator\":", "\"value\":", "\"r_squared\":",
                            "\"window\":"}) {
        CAPTURE(key);
        CHECK(js.find(key) != std::string::npos);
    }
    CHECK(js.find("\"box\"") != std::string::npos);
}

TEST_CASE("series exports are two-column csv files") {
    const PointCloud sier = triangle_cloud(5);

    const BoxCountSeries bs = box_counts(sier, 6);
    const auto bpath = temp_file("box_series");
    write_box_series_csv(bs, bpath);
    const auto blines = read_lines(bpath);
    REQUIRE(blines.size() == 7);
    CHECK(blines[0] == "epsilon,count");
    std::filesystem::remove(bpath);

    const EntropySeries es = entropy_series(sier, 6);
    const auto epath = temp_file("entropy_series");
    write_entropy_series_csv(es, epath);
    const auto elines = read_lines(epath);
    REQUIRE(elines.size() == 7);
    CHECK(elines[0] == "epsilon,entropy");
    std::filesystem::remove(epath);

    const CorrelationSeries cs =
        correlation_series(sier, default_radii(sier, 10), 200000, 2);
    const auto cpath = temp_file("correlation_series");
    write_correlation_series_csv(cs, cpath);
    const auto clines = read_lines(cpath);
    REQUIRE(clines.size() == cs.radii.size() + 1);
    CHECK(clines[0] == "radius,correlation");
    std::filesystem::remove(cpath);
}

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "landscape/geometry.hpp"
#include "landscape/space_filling.hpp"

using namespace landscape;

namespace {

Architecture one_unit_relu(int layers = 1) {
    Architecture arch;
    arch.input_dim = 1;
    arch.widths.assign(static_cast<std::size_t>(layers), 1);
    arch.activations.assign(static_cast<std::size_t>(layers), Activation::relu());
    arch.validate();
    return arch;
}

bool contains_near(const std::vector<std::vector<double>>& vecs, const std::vector<double>& v,
                   double tol) {
    for (const auto& w : vecs) {
        double worst = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            worst = std::max(worst, std::abs(w[i] - v[i]));
        if (worst <= tol) return true;
    }
    return false;
}

} // namespace

TEST_CASE("pool-adjacent-violators projects onto the requested cone") {
    const std::vector<double> bump = {0.0, 1.0, 0.0};
    CHECK(isotonic_fit(bump) == std::vector<double>{0.0, 0.5, 0.5});
    CHECK(isotonic_fit(bump, true) == std::vector<double>{0.5, 0.5, 0.0});

    const std::vector<double> sorted = {-1.0, 0.0, 2.0, 2.0};
    CHECK(isotonic_fit(sorted) == sorted);
    CHECK(isotonic_fit({3.0}) == std::vector<double>{3.0});

    // projection averages violating blocks
    const std::vector<double> fit = isotonic_fit({1.0, 0.0, 0.0, 2.0});
    CHECK(fit[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(fit[1] == fit[0]);
    CHECK(fit[2] == fit[0]);
    CHECK(fit[3] == 2.0);
}

TEST_CASE("monotone distance matches the hand-computed projections") {
    const MonotoneProjection bump = monotone_distance({0.0, 1.0, 0.0});
    CHECK(bump.distance_sq == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(bump.minimizers.size() == 2);
    CHECK(contains_near(bump.minimizers, {0.0, 0.5, 0.5}, 1e-12));
    CHECK(contains_near(bump.minimizers, {0.5, 0.5, 0.0}, 1e-12));

    const MonotoneProjection dip = monotone_distance({1.0, 0.0, 1.0});
    CHECK(dip.distance_sq == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(contains_near(dip.minimizers, {0.5, 0.5, 1.0}, 1e-12));
    CHECK(contains_near(dip.minimizers, {1.0, 0.5, 0.5}, 1e-12));

    const MonotoneProjection mid = monotone_distance({0.5, 0.0, 1.0});
    CHECK(mid.distance_sq == doctest::Approx(0.125).epsilon(1e-12));
    REQUIRE(mid.minimizers.size() == 1);
    CHECK(contains_near(mid.minimizers, {0.25, 0.25, 1.0}, 1e-12));

    const MonotoneProjection flat = monotone_distance({1.0, 2.0, 2.5});
    CHECK(flat.distance_sq == 0.0);
    CHECK(flat.minimizers.front() == std::vector<double>{1.0, 2.0, 2.5});

    // squared distance is 2-homogeneous
    const MonotoneProjection scaled = monotone_distance({0.0, 2.0, 0.0});
    CHECK(scaled.distance_sq == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("monotonicity test accepts either orientation") {
    CHECK(is_monotone({0.0, 0.0, 1.0}));
    CHECK(is_monotone({1.0, 0.0, 0.0}));
    CHECK_FALSE(is_monotone({0.0, 1.0, 0.0}));
    CHECK(is_monotone({0.0, -1e-13, 0.0})); // inside default tolerance
    CHECK(is_monotone({5.0}));
}

TEST_CASE("one-unit monotone detection") {
    CHECK(monotone_one_unit(one_unit_relu(1)));
    CHECK(monotone_one_unit(one_unit_relu(3)));

    Architecture arch = one_unit_relu(2);
    arch.activations = {Activation::elu(), Activation::isrlu()};
    CHECK(monotone_one_unit(arch));
    arch.activations = {Activation::sqnl(), Activation::leaky_relu(0.01)};
    CHECK(monotone_one_unit(arch));
    arch.activations = {Activation::plu(0.1, 1.0), Activation::relu()};
    CHECK(monotone_one_unit(arch));

    // a negative-slope parametric unit is not monotone
    arch.activations = {Activation::prelu(-0.5), Activation::relu()};
    CHECK_FALSE(monotone_one_unit(arch));

    // width two breaks the one-unit argument
    Architecture wide;
    wide.input_dim = 1;
    wide.widths = {2};
    wide.activations = {Activation::relu()};
    wide.validate();
    CHECK_FALSE(monotone_one_unit(wide));

    // the oscillating activation is deliberately non-monotone
    auto payload = std::make_shared<const SpaceFillingActivation>(Activation::sqnl(), 5.0, 6.0, 0.1);
    Architecture sf = one_unit_relu(1);
    sf.activations = {Activation::space_filling(payload)};
    CHECK_FALSE(monotone_one_unit(sf));
}

TEST_CASE("sampled one-unit clouds are monotone and deterministic") {
    const Architecture arch = one_unit_relu(1);
    const FiniteMeasure mu = FiniteMeasure::from_points({{-1.0}, {0.0}, {2.0}});

    const ImageCloud cloud = sample_image(arch, mu, 2000, -10.0, 10.0, -5.0, 5.0, 42);
    REQUIRE(cloud.rows.size() == 2000);
    double max_abs = 0.0;
    for (const auto& row : cloud.rows) {
        REQUIRE(row.size() == 3);
        CHECK(is_monotone(row, 1e-12));
        for (double z : row) max_abs = std::max(max_abs, std::abs(z));
    }
    // |a2 sigma(a1 x + b1) + b2| <= 10 * (10 * 2 + 5) + 5 on this support
    CHECK(max_abs <= 255.0 + 1e-9);
    CHECK(max_abs > 10.0); // the ranges are actually exercised

    const ImageCloud repeat = sample_image(arch, mu, 2000, -10.0, 10.0, -5.0, 5.0, 42);
    CHECK(repeat.rows == cloud.rows);
    const ImageCloud threaded = sample_image(arch, mu, 2000, -10.0, 10.0, -5.0, 5.0, 42, 3);
    CHECK(threaded.rows == cloud.rows);

    // degenerate ranges pin every draw to the same network
    const ImageCloud pinned = sample_image(arch, mu, 8, 1.0, 1.0, 0.0, 0.0, 7);
    for (const auto& row : pinned.rows) {
        CHECK(row[0] == 0.0);
        CHECK(row[1] == 0.0);
        CHECK(row[2] == 2.0);
    }
}

TEST_CASE("projection multistart finds both tied minimizers of the middle bump") {
    const Architecture arch = one_unit_relu(1);
    const FiniteMeasure mu = FiniteMeasure::from_points({{-1.0}, {0.0}, {1.0}});
    const std::vector<double> u = {0.0, 1.0, 0.0};

    const ProjectionResult res = project_multistart(arch, mu, u, 500, 9);
    CHECK(res.restarts == 500);
    CHECK(res.oracle_used);
    CHECK(res.oracle_distance_sq == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(res.distance_sq == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(res.distance_sq >= res.oracle_distance_sq - 1e-8);

    REQUIRE(res.minimizers.size() >= 2);
    CHECK(contains_near(res.minimizers, {0.0, 0.5, 0.5}, 1e-2));
    CHECK(contains_near(res.minimizers, {0.5, 0.5, 0.0}, 1e-2));
    int total = 0;
    for (int c : res.cluster_counts) total += c;
    CHECK(total <= 500);
    CHECK(res.cluster_counts.size() == res.minimizers.size());
}

TEST_CASE("projection of a realizable vector has zero distance") {
    const Architecture arch = one_unit_relu(1);
    const FiniteMeasure mu = FiniteMeasure::from_points({{-1.0}, {0.0}, {1.0}});
    const ProjectionResult res = project_multistart(arch, mu, {0.0, 0.0, 0.0}, 50, 3);
    CHECK(res.distance_sq <= 1e-9);
    CHECK(contains_near(res.minimizers, {0.0, 0.0, 0.0}, 1e-3));
}

TEST_CASE("scanning across a projection tie flags exactly one discontinuity") {
    const Architecture arch = one_unit_relu(1);
    const FiniteMeasure mu = FiniteMeasure::from_points({{-1.0}, {0.0}, {1.0}});
    // the path crosses the symmetric bump (0, 1, 0), where the projection
    // flips from one plateau to the other
    const std::vector<std::vector<double>> waypoints = {{0.05, 1.0, 0.0}, {0.0, 1.0, 0.05}};

    const ScanResult scan = discontinuity_scan(arch, mu, waypoints, 100, 40, 13);
    CHECK(scan.points.size() == 101);
    REQUIRE(scan.jumps.size() == 1);
    CHECK(scan.jumps[0].size >= 0.1);
    CHECK(scan.jumps[0].index >= 35);
    CHECK(scan.jumps[0].index <= 65);
    for (const auto& pt : scan.points) {
        CHECK(pt.minimizer.size() == 3);
        CHECK(pt.distance_sq >= -1e-15);
        CHECK(pt.t >= 0.0);
        CHECK(pt.t <= 1.0);
    }

    // a constant path has nothing to jump across
    const ScanResult still =
        discontinuity_scan(arch, mu, {{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}}, 20, 20, 13);
    CHECK(still.jumps.empty());
}

TEST_CASE("midpoints of realizable vectors certify nonconvexity of the image") {
    const Architecture arch = one_unit_relu(1);
    const FiniteMeasure mu = FiniteMeasure::from_points({{-1.0}, {0.0}, {2.0}});
    ImageCloud cloud;
    cloud.rows = {{0.0, 0.0, 2.0}, {1.0, 0.0, 0.0}}; // both one-unit realizable

    const NonconvexityCertificate cert = nonconvexity_certificate(arch, mu, cloud, 3, 20, 5);
    CHECK(cert.certified);
    REQUIRE(cert.midpoint.size() == 3);
    CHECK(cert.midpoint[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cert.midpoint[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cert.midpoint[2] == doctest::Approx(1.0).epsilon(1e-15));
    // exact monotone distance of (1/2, 0, 1) is 1/8
    CHECK(cert.midpoint_distance_sq == doctest::Approx(0.125).epsilon(1e-9));
}

#include <doctest.h>

#include <cmath>

#include "landscape/loss.hpp"
#include "landscape/rng.hpp"

using namespace landscape;

TEST_CASE("loss values on worked points") {
    const auto [mu, y] = make_dataset({{-1.0}, {0.0}, {1.0}}, {1.0, 0.0, 1.0});
    const LossSpec p2{2.0};
    CHECK(loss_value(p2, mu, {1.0, 0.0, 1.0}, y) == 0.0);
    const double two_thirds = 2.0 / 3.0;
    CHECK(loss_value(p2, mu, {two_thirds, two_thirds, two_thirds}, y) ==
          doctest::Approx(2.0 / 9.0).epsilon(1e-15));

    const auto [single, ys] = make_dataset({{0.0}}, {3.0}, {1.0});
    CHECK(loss_value(p2, single, {6.0}, ys) == 9.0);
}

TEST_CASE("prediction gradient follows the signed power rule") {
    const auto [mu, y] = make_dataset({{0.0}}, {0.0}, {1.0});
    const LossSpec p4{4.0};
    CHECK(loss_gradient_predictions(p4, mu, {-2.0}, y)[0] == doctest::Approx(-32.0).epsilon(1e-15));
    const LossSpec p2{2.0};
    CHECK(loss_gradient_predictions(p2, mu, {3.0}, y)[0] == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(loss_gradient_predictions(p2, mu, {0.0}, y)[0] == 0.0);
}

TEST_CASE("best affine solves the worked example exactly") {
    const auto [mu, y] = make_dataset({{-1.0}, {0.0}, {1.0}}, {1.0, 0.0, 1.0});
    const BestAffine fit = best_affine(LossSpec{2.0}, mu, y);
    CHECK(std::abs(fit.map.slope[0]) <= 1e-12);
    CHECK(std::abs(fit.map.intercept - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(fit.loss - 2.0 / 9.0) <= 1e-12);
}

TEST_CASE("best affine recovers exact affine targets for any p") {
    const std::vector<std::vector<double>> pts = {{-1.0}, {0.5}, {2.0}, {3.0}};
    std::vector<double> vals;
    for (const auto& x : pts) vals.push_back(2.0 * x[0] + 1.0);
    const auto [mu, y] = make_dataset(pts, vals);
    for (const double p : {2.0, 2.5, 4.0}) {
        const BestAffine fit = best_affine(LossSpec{p}, mu, y);
        CHECK(std::abs(fit.map.slope[0] - 2.0) <= 1e-7);
        CHECK(std::abs(fit.map.intercept - 1.0) <= 1e-7);
        CHECK(fit.loss <= 1e-12);
    }
}

TEST_CASE("best affine beats random competitors") {
    Rng rng(0xc0ffeeULL);
    const auto [mu, y] =
        make_dataset({{-1.0}, {0.0}, {1.0}, {2.0}}, {1.0, 0.3, -0.4, 2.0}, {0.1, 0.4, 0.3, 0.2});
    for (const double p : {2.0, 3.0, 1.5}) {
        const BestAffine fit = best_affine(LossSpec{p}, mu, y);
        for (int trial = 0; trial < 100; ++trial) {
            const double a = rng.uniform(-3.0, 3.0), c = rng.uniform(-3.0, 3.0);
            std::vector<double> preds;
            for (const auto& x : mu.points) preds.push_back(a * x[0] + c);
            CHECK(fit.loss <= loss_value(LossSpec{p}, mu, preds, y) + 1e-10);
        }
    }
}

TEST_CASE("best affine handles rank-deficient designs with the min-norm slope") {
    // all points share x2 = 1, so the second slope coordinate is undetermined
    const auto [mu, y] = make_dataset({{-1.0, 1.0}, {0.0, 1.0}, {1.0, 1.0}}, {-1.0, 0.0, 1.0});
    const BestAffine fit = best_affine(LossSpec{2.0}, mu, y);
    CHECK(fit.loss <= 1e-20);
    // slope (1, 0) with intercept 0 is the minimum-norm exact fit; the
    // alternative (1, t) with intercept -t has larger norm for t != 0
    CHECK(std::abs(fit.map.slope[0] - 1.0) <= 1e-9);
    CHECK(std::abs(fit.map.slope[1]) <= 1e-9);
}

TEST_CASE("best constant is the weighted p-mean") {
    const auto [mu, y] = make_dataset({{-1.0}, {0.0}, {1.0}}, {1.0, 0.0, 1.0});
    const BestConstant fit = best_constant(LossSpec{2.0}, mu, y);
    CHECK(std::abs(fit.value - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(fit.loss - 2.0 / 9.0) <= 1e-12);

    const auto [mu2, y2] = make_dataset({{0.0}, {1.0}}, {0.0, 1.0}, {1.0, 1.0});
    const BestConstant half = best_constant(LossSpec{2.0}, mu2, y2);
    CHECK(std::abs(half.value - 0.5) <= 1e-12);
    CHECK(std::abs(half.loss - 0.5) <= 1e-12);

    const auto [mu3, y3] = make_dataset({{0.0}, {1.0}, {2.0}}, {4.0, 4.0, 4.0});
    for (const double p : {2.0, 3.5}) {
        const BestConstant fit3 = best_constant(LossSpec{p}, mu3, y3);
        CHECK(std::abs(fit3.value - 4.0) <= 1e-9);
        CHECK(fit3.loss <= 1e-12);
        CHECK(fit3.value >= 4.0 - 1e-9);
        CHECK(fit3.value <= 4.0 + 1e-9);
    }
}

TEST_CASE("target classification") {
    const auto [mu, y] = make_dataset({{-1.0}, {0.0}, {1.0}}, {1.0, 0.0, 1.0});
    const TargetClassification cls = classify_target(mu, y);
    CHECK(!cls.affine_fit);
    CHECK(!cls.constant_fit);

    const auto [mu2, y2] = make_dataset({{-1.0}, {0.0}, {1.0}}, {-5.0, -2.0, 1.0});
    const TargetClassification affine = classify_target(mu2, y2);
    CHECK(affine.affine_fit);
    CHECK(!affine.constant_fit);
    CHECK(std::abs(affine.affine.slope[0] - 3.0) <= 1e-9);
    CHECK(std::abs(affine.affine.intercept + 2.0) <= 1e-9);

    const auto [mu3, y3] = make_dataset({{0.0}, {2.0}}, {0.7, 0.7});
    const TargetClassification constant = classify_target(mu3, y3);
    CHECK(constant.affine_fit);
    CHECK(constant.constant_fit);
    CHECK(std::abs(constant.constant - 0.7) <= 1e-12);

    // a single sample is always degenerate
    const auto [mu4, y4] = make_dataset({{5.0}}, {1.3});
    const TargetClassification single = classify_target(mu4, y4);
    CHECK(single.affine_fit);
    CHECK(single.constant_fit);
}

TEST_CASE("dataset ingestion merges duplicates and rejects conflicts") {
    const auto [mu, y] = make_dataset({{1.0}, {1.0}, {2.0}}, {3.0, 3.0, 5.0});
    CHECK(mu.size() == 2);
    CHECK(mu.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(y.values[0] == 3.0);

    CHECK_THROWS_AS(make_dataset({{1.0}, {1.0}}, {3.0, 4.0}), PreconditionError);
    CHECK_THROWS_AS(make_dataset({{1.0}}, {3.0}, {-1.0}), PreconditionError);
    CHECK_THROWS_AS(LossSpec{1.0}.validate(), PreconditionError);
    CHECK_THROWS_AS(LossSpec{0.5}.validate(), PreconditionError);
}

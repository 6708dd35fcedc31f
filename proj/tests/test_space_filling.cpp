#include <doctest.h>

#include <cmath>
#include <memory>

#include "landscape/net.hpp"
#include "landscape/space_filling.hpp"

using namespace landscape;

namespace {

std::shared_ptr<const SpaceFillingActivation> make_sqnl_filling() {
    return std::make_shared<const SpaceFillingActivation>(Activation::sqnl(), 5.0, 6.0, 0.1);
}

} // namespace

TEST_CASE("layout on the worked interval") {
    const auto act = make_sqnl_filling();
    // SQNL is constant 1 on (5, 6), so the first plateau attempt sticks
    CHECK(act->window_start() == doctest::Approx(5.275).epsilon(1e-12));
    CHECK(act->window_length() == doctest::Approx(0.5625).epsilon(1e-12));
    CHECK(act->plateau_value() == 1.0);
}

TEST_CASE("equals the base outside the interval, exactly") {
    const auto act = make_sqnl_filling();
    const Activation base = Activation::sqnl();
    for (int i = 0; i <= 4000; ++i) {
        const double s = -10.0 + 20.0 * i / 4000.0;
        if (s > 5.0 && s < 6.0) continue;
        CHECK(act->eval(s) == base(s));
    }
}

TEST_CASE("stays within the amplitude of the base") {
    const auto act = make_sqnl_filling();
    const Activation base = Activation::sqnl();
    double max_dev = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double s = 4.5 + 2.0 * i / 20000.0;
        max_dev = std::max(max_dev, std::abs(act->eval(s) - base(s)));
    }
    CHECK(max_dev < 0.1);
    CHECK(max_dev > 0.01); // the cascade is actually there
}

TEST_CASE("continuous across carrier and transition boundaries") {
    const auto act = make_sqnl_filling();
    const double a = act->window_start(), eta = act->window_length();
    for (int k = 1; k <= 10; ++k) {
        for (const double u : {std::ldexp(1.0, 1 - 2 * k), std::ldexp(1.0, 2 - 2 * k)}) {
            const double s = a + eta * (1.0 - u);
            const double lo = std::nextafter(s, -1e300), hi = std::nextafter(s, 1e300);
            CHECK(std::abs(act->eval(hi) - act->eval(lo)) <= 1e-9);
        }
    }
    // joins of the blend ramps and the plateau
    for (const double s : {5.05, 5.1625, 5.95}) {
        const double lo = std::nextafter(s, -1e300), hi = std::nextafter(s, 1e300);
        CHECK(std::abs(act->eval(hi) - act->eval(lo)) <= 1e-9);
    }
    // the cascade accumulates at the window end: band k has envelope
    // amplitude / (2k), and the deepest band reachable in doubles is
    // k ~ 26, so the step onto the plateau there is ~ amplitude / 52,
    // not zero -- the function is continuous only in exact arithmetic
    {
        const double s = a + eta;
        const double lo = std::nextafter(s, -1e300), hi = std::nextafter(s, 1e300);
        CHECK(std::abs(act->eval(hi) - act->eval(lo)) <= 0.1 / 40.0);
    }
    CHECK(act->eval(act->window_start()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("carrier bands reproduce the scaled polynomials in place") {
    const auto act = make_sqnl_filling();
    const double a = act->window_start(), eta = act->window_length();
    for (std::size_t k = 1; k <= 6; ++k) {
        const double scale = 0.1 / (2.0 * static_cast<double>(k) * act->polynomial_sup_norm(k));
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            const double s = a + eta * (1.0 - std::ldexp(1.0, 2 - 2 * static_cast<int>(k))) +
                             eta * std::ldexp(1.0, 1 - 2 * static_cast<int>(k)) * x;
            const double bump = act->eval(s) - 1.0;
            CHECK(std::abs(bump - scale * act->polynomial(k).eval(x)) <= 1e-10);
        }
    }
}

TEST_CASE("readout networks reproduce the enumerated polynomials") {
    const auto act = make_sqnl_filling();
    for (std::size_t k = 1; k <= 9; ++k) {
        const ReadoutParams r = act->readout_params(k);
        double max_err = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            const double out = r.a2 * act->eval(r.a1 * x + r.b1) + r.b2;
            max_err = std::max(max_err, std::abs(out - act->polynomial(k).eval(x)));
        }
        CHECK(max_err <= 1e-9);
    }
    // deeper entries lose precision to input quantization but stay usable
    for (std::size_t k = 10; k <= 14; ++k) {
        const ReadoutParams r = act->readout_params(k);
        double max_err = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            const double out = r.a2 * act->eval(r.a1 * x + r.b1) + r.b2;
            max_err = std::max(max_err, std::abs(out - act->polynomial(k).eval(x)));
        }
        CHECK(max_err <= 1e-6);
    }
}

TEST_CASE("readout works through the network forward pass") {
    const auto payload = make_sqnl_filling();
    Architecture arch;
    arch.input_dim = 1;
    arch.widths = {1};
    arch.activations = {Activation::space_filling(payload)};

    for (const std::size_t k : {std::size_t{1}, std::size_t{9}}) {
        const ReadoutParams r = payload->readout_params(k);
        Parameters params = Parameters::zeros(arch);
        params.weights[0](0, 0) = r.a1;
        params.biases[0][0] = r.b1;
        params.weights[1](0, 0) = r.a2;
        params.biases[1][0] = r.b2;
        double max_err = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            max_err = std::max(max_err,
                               std::abs(forward(arch, params, {x}) - payload->polynomial(k).eval(x)));
        }
        CHECK(max_err <= 1e-9);
    }
    // entry 9 is x^2: check against the honest polynomial, not just the enum
    CHECK(payload->polynomial(9).to_string() == "x^2");
}

TEST_CASE("derivative matches finite differences inside the window") {
    const auto act = make_sqnl_filling();
    const double a = act->window_start(), eta = act->window_length();
    for (int i = 1; i < 200; ++i) {
        const double s = a + eta * (i / 200.0 + 0.0003);
        const double h = 1e-9;
        const double fd = (act->eval(s + h) - act->eval(s - h)) / (2 * h);
        const double an = act->derivative(s);
        // piece boundaries are dense near the right edge; allow skips there
        if (std::abs(an - fd) > 1e-3 * std::max(1.0, std::abs(an))) {
            CHECK(1.0 - (s - a) / eta < 0.02);
        }
    }
}

TEST_CASE("works on a sloped base too") {
    // ISRLU is nowhere flat on (-1.5, 2.5); the plateau search has to shrink
    const SpaceFillingActivation act(Activation::isrlu(), -1.5, 2.5, 0.1);
    const Activation base = Activation::isrlu();
    CHECK(std::abs(act.plateau_value() - 0.5) < 0.05);

    double max_dev = 0.0;
    for (int i = 0; i <= 40000; ++i) {
        const double s = -3.0 + 7.0 * i / 40000.0;
        const double dev = std::abs(act.eval(s) - base(s));
        if (s <= -1.5 || s >= 2.5) CHECK(dev == 0.0);
        max_dev = std::max(max_dev, dev);
    }
    CHECK(max_dev < 0.1);

    const ReadoutParams r = act.readout_params(1);
    double max_err = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        max_err = std::max(max_err, std::abs(r.a2 * act.eval(r.a1 * x + r.b1) + r.b2 - x));
    }
    CHECK(max_err <= 1e-9);
}

TEST_CASE("rejects bad construction inputs") {
    CHECK_THROWS_AS(SpaceFillingActivation(Activation::sqnl(), 6.0, 5.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(SpaceFillingActivation(Activation::sqnl(), 5.0, 6.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(SpaceFillingActivation(Activation::sqnl(), 5.0, 6.0, -1.0), PreconditionError);
}

#include "landscape/space_filling.hpp"

#include <cmath>
#include <mutex>

namespace landscape {

namespace {

std::mutex poly_mutex;

// Deepest cascade index we ever evaluate. Windows beyond this are narrower
// than one ulp of any representable input, so treating them as zero is not
// observable.
constexpr std::size_t kMaxBand = 64;

} // namespace

SpaceFillingActivation::SpaceFillingActivation(Activation base, double interval_lo,
                                               double interval_hi, double amplitude)
    : base_(base), interval_lo_(interval_lo), interval_hi_(interval_hi), amplitude_(amplitude) {
    if (!(interval_lo < interval_hi)) throw PreconditionError("space_filling: empty interval");
    if (!(amplitude > 0.0)) throw PreconditionError("space_filling: amplitude must be positive");

    // Find a sub-interval of I on which the base oscillates by at most
    // amplitude/4; the flattening blend then stays within amplitude/4 of the
    // base and the cascade adds at most amplitude/2.
    const double mid = 0.5 * (interval_lo + interval_hi);
    double width = 0.9 * (interval_hi - interval_lo);
    bool found = false;
    for (int attempt = 0; attempt < 60; ++attempt, width *= 0.5) {
        const double lo = mid - 0.5 * width, hi = mid + 0.5 * width;
        double vmin = base(lo), vmax = base(lo);
        for (int i = 1; i <= 1000; ++i) {
            const double v = base(lo + (hi - lo) * i / 1000.0);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        if (vmax - vmin <= 0.25 * amplitude) {
            plateau_lo_ = lo;
            plateau_hi_ = hi;
            found = true;
            break;
        }
    }
    if (!found) throw PreconditionError("space_filling: no flat enough plateau inside interval");

    const double w = plateau_hi_ - plateau_lo_;
    blend_ = 0.125 * w;
    plateau_value_ = base(mid);
    window_start_ = plateau_lo_ + 0.25 * w;       // leaves a constant lead sub-window
    window_length_ = plateau_hi_ - blend_ - window_start_;

    std::lock_guard<std::mutex> lock(poly_mutex);
    polys_.at(kMaxBand); // pre-extend so eval never grows the cache
}

const Polynomial& SpaceFillingActivation::polynomial(std::size_t k) const {
    std::lock_guard<std::mutex> lock(poly_mutex);
    return polys_.at(k);
}

double SpaceFillingActivation::polynomial_sup_norm(std::size_t k) const {
    std::lock_guard<std::mutex> lock(poly_mutex);
    return polys_.sup_norm(k);
}

double SpaceFillingActivation::carrier_scale(std::size_t k) const {
    return amplitude_ / (2.0 * static_cast<double>(k) * polynomial_sup_norm(k));
}

double SpaceFillingActivation::flattened(double s) const {
    if (s <= plateau_lo_ || s >= plateau_hi_) return base_(s);
    if (s < plateau_lo_ + blend_) {
        const double lam = (s - plateau_lo_) / blend_;
        return (1.0 - lam) * base_(s) + lam * plateau_value_;
    }
    if (s > plateau_hi_ - blend_) {
        const double lam = (plateau_hi_ - s) / blend_;
        return (1.0 - lam) * base_(s) + lam * plateau_value_;
    }
    return plateau_value_;
}

double SpaceFillingActivation::flattened_derivative(double s) const {
    if (s <= plateau_lo_ || s >= plateau_hi_) return base_.derivative(s);
    if (s < plateau_lo_ + blend_) {
        const double lam = (s - plateau_lo_) / blend_;
        return (1.0 - lam) * base_.derivative(s) + (plateau_value_ - base_(s)) / blend_;
    }
    if (s > plateau_hi_ - blend_) {
        const double lam = (plateau_hi_ - s) / blend_;
        return (1.0 - lam) * base_.derivative(s) - (plateau_value_ - base_(s)) / blend_;
    }
    return 0.0;
}

double SpaceFillingActivation::bump(double s) const {
    const double t = (s - window_start_) / window_length_;
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = 1.0 - t;
    if (u < std::ldexp(1.0, -2 * static_cast<int>(kMaxBand))) return 0.0;
    const int guess = static_cast<int>(std::floor(-std::log2(u) * 0.5)) + 1;
    for (int k = std::max(1, guess - 2); k <= guess + 2; ++k) {
        const double carrier_lo = std::ldexp(1.0, 1 - 2 * k);
        const double carrier_hi = std::ldexp(1.0, 2 - 2 * k);
        if (u >= carrier_lo && u <= carrier_hi) {
            const double x = 2.0 - u * std::ldexp(1.0, 2 * k - 1);
            return carrier_scale(static_cast<std::size_t>(k)) *
                   polynomial(static_cast<std::size_t>(k)).eval(x);
        }
        const double trans_lo = std::ldexp(1.0, -2 * k);
        if (u >= trans_lo && u < carrier_lo) {
            // Straight line in s from p_k's right edge to p_{k+1}'s left edge.
            const double left = carrier_scale(static_cast<std::size_t>(k)) *
                                polynomial(static_cast<std::size_t>(k)).eval(1.0);
            const double right = carrier_scale(static_cast<std::size_t>(k) + 1) *
                                 polynomial(static_cast<std::size_t>(k) + 1).eval(0.0);
            const double w = (u - trans_lo) / trans_lo; // 1 at left edge, 0 at right
            return right + (left - right) * w;
        }
    }
    return 0.0;
}

double SpaceFillingActivation::bump_derivative(double s) const {
    const double t = (s - window_start_) / window_length_;
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = 1.0 - t;
    if (u < std::ldexp(1.0, -2 * static_cast<int>(kMaxBand))) return 0.0;
    const int guess = static_cast<int>(std::floor(-std::log2(u) * 0.5)) + 1;
    for (int k = std::max(1, guess - 2); k <= guess + 2; ++k) {
        const double carrier_lo = std::ldexp(1.0, 1 - 2 * k);
        const double carrier_hi = std::ldexp(1.0, 2 - 2 * k);
        if (u >= carrier_lo && u <= carrier_hi) {
            const double x = 2.0 - u * std::ldexp(1.0, 2 * k - 1);
            // dx/ds = 2^{2k-1} / eta
            return carrier_scale(static_cast<std::size_t>(k)) *
                   polynomial(static_cast<std::size_t>(k)).derivative_eval(x) *
                   std::ldexp(1.0, 2 * k - 1) / window_length_;
        }
        const double trans_lo = std::ldexp(1.0, -2 * k);
        if (u >= trans_lo && u < carrier_lo) {
            const double left = carrier_scale(static_cast<std::size_t>(k)) *
                                polynomial(static_cast<std::size_t>(k)).eval(1.0);
            const double right = carrier_scale(static_cast<std::size_t>(k) + 1) *
                                 polynomial(static_cast<std::size_t>(k) + 1).eval(0.0);
            return (right - left) / (window_length_ * trans_lo);
        }
    }
    return 0.0;
}

double SpaceFillingActivation::eval(double s) const { return flattened(s) + bump(s); }

double SpaceFillingActivation::derivative(double s) const {
    return flattened_derivative(s) + bump_derivative(s);
}

ReadoutParams SpaceFillingActivation::readout_params(std::size_t k) const {
    if (k == 0) throw PreconditionError("readout_params: k is 1-based");
    ReadoutParams r;
    r.a1 = window_length_ * std::ldexp(1.0, 1 - 2 * static_cast<int>(k));
    r.b1 = window_start_ +
           window_length_ * (1.0 - std::ldexp(1.0, 2 - 2 * static_cast<int>(k)));
    r.a2 = 1.0 / carrier_scale(k);
    r.b2 = -r.a2 * plateau_value_;
    return r;
}

} // namespace landscape

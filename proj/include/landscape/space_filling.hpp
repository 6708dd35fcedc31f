#pragma once

#include <memory>
#include <vector>

#include "landscape/activation.hpp"
#include "landscape/polynomials.hpp"

namespace landscape {

// Single-layer readout of one carrier sub-window: a (1,1)-shaped network
// A2 * sigma(A1 * x + b1) + b2 that reproduces the k-th enumerated polynomial
// on [0,1] when sigma is the space-filling activation that owns it.
struct ReadoutParams {
    double a1 = 0.0;
    double b1 = 0.0;
    double a2 = 0.0;
    double b2 = 0.0;
};

// Perturbation of a base activation inside an interval I: the base is first
// flattened onto a constant plateau in the middle of I (staying within
// amplitude/2 of the base), then a geometric cascade of sub-windows at the
// right end of the plateau carries every enumerated rational polynomial,
// scaled to die out towards the accumulation point. Outside I the activation
// equals the base exactly.
class SpaceFillingActivation : public std::enable_shared_from_this<SpaceFillingActivation> {
  public:
    // interval_lo < interval_hi, amplitude > 0. Throws PreconditionError when
    // the base oscillates too much on every candidate plateau (never happens
    // for the catalog activations on a bounded interval).
    SpaceFillingActivation(Activation base, double interval_lo, double interval_hi,
                           double amplitude);

    double eval(double s) const;
    double derivative(double s) const;

    const Activation& base() const { return base_; }
    double interval_lo() const { return interval_lo_; }
    double interval_hi() const { return interval_hi_; }
    double amplitude() const { return amplitude_; }
    // Carrier window (a, a + eta): the cascade lives here.
    double window_start() const { return window_start_; }
    double window_length() const { return window_length_; }
    double plateau_value() const { return plateau_value_; }

    // Parameters of the width-1 depth-1 network reading out p_k on [0,1].
    ReadoutParams readout_params(std::size_t k) const;

    const Polynomial& polynomial(std::size_t k) const;
    double polynomial_sup_norm(std::size_t k) const;

  private:
    // Cascade bump on top of the plateau; zero outside (a, a + eta).
    double bump(double s) const;
    double bump_derivative(double s) const;
    // Plateau-flattened base.
    double flattened(double s) const;
    double flattened_derivative(double s) const;
    double carrier_scale(std::size_t k) const;

    Activation base_;
    double interval_lo_, interval_hi_;
    double amplitude_;
    double plateau_lo_ = 0.0, plateau_hi_ = 0.0; // [j0, j1]: where we touch the base
    double blend_ = 0.0;                         // width of each blend ramp
    double plateau_value_ = 0.0;
    double window_start_ = 0.0;  // a
    double window_length_ = 0.0; // eta

    mutable PolynomialEnumerator polys_;
};

} // namespace landscape

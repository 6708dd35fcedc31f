#pragma once

#include <memory>
#include <optional>
#include <string>

#include "landscape/errors.hpp"

namespace landscape {

class SpaceFillingActivation;

enum class ActivationTag { ReLU, LeakyReLU, PReLU, ELU, ISRLU, PLU, SQNL, SpaceFilling };

std::string tag_name(ActivationTag tag);

// One maximal interval (c - eps, c + eps) on which an activation is exactly
// affine: sigma(s) = slope * s + offset there. slope == 0 marks a constant
// segment.
struct AffineSegment {
    double center = 0.0; // c
    double radius = 0.0; // eps
    double slope = 0.0;  // beta
    double offset = 0.0; // gamma

    bool is_constant() const { return slope == 0.0; }
    double lo() const { return center - radius; }
    double hi() const { return center + radius; }
};

// Scalar activation. A cheap value type; the space-filling variant carries a
// shared immutable payload.
class Activation {
  public:
    static Activation relu();
    static Activation leaky_relu(double slope = 0.01);
    static Activation prelu(double slope);
    static Activation elu(double scale = 1.0);
    static Activation isrlu(double scale = 1.0);
    static Activation plu(double slope = 0.1, double knee = 1.0);
    static Activation sqnl();
    static Activation space_filling(std::shared_ptr<const SpaceFillingActivation> payload);

    double operator()(double s) const;
    // Right derivative at kinks.
    double derivative(double s) const;

    ActivationTag tag() const { return tag_; }
    double param1() const { return p1_; } // slope or scale, depending on kind
    double param2() const { return p2_; } // PLU knee
    const std::shared_ptr<const SpaceFillingActivation>& payload() const { return payload_; }

    // Canonical maximal-affine-segment pick: radius 1 where the piece allows
    // it, center at distance >= 1 from the nearest kink where possible.
    // Empty when the activation has no segment of the requested kind.
    std::optional<AffineSegment> default_segment(bool want_constant) const;

    // Largest |sigma| over [-m, m]; used by the radius certification.
    double abs_bound(double m) const;

  private:
    Activation(ActivationTag tag, double p1, double p2) : tag_(tag), p1_(p1), p2_(p2) {}

    ActivationTag tag_ = ActivationTag::ReLU;
    double p1_ = 0.0;
    double p2_ = 0.0;
    std::shared_ptr<const SpaceFillingActivation> payload_;
};

} // namespace landscape

#include "landscape/activation.hpp"

#include <algorithm>
#include <cmath>

#include "landscape/space_filling.hpp"

namespace landscape {

std::string tag_name(ActivationTag tag) {
    switch (tag) {
        case ActivationTag::ReLU: return "relu";
        case ActivationTag::LeakyReLU: return "leaky_relu";
        case ActivationTag::PReLU: return "prelu";
        case ActivationTag::ELU: return "elu";
        case ActivationTag::ISRLU: return "isrlu";
        case ActivationTag::PLU: return "plu";
        case ActivationTag::SQNL: return "sqnl";
        case ActivationTag::SpaceFilling: return "space_filling";
    }
    return "?";
}

Activation Activation::relu() { return Activation(ActivationTag::ReLU, 0.0, 0.0); }

Activation Activation::leaky_relu(double slope) {
    return Activation(ActivationTag::LeakyReLU, slope, 0.0);
}

Activation Activation::prelu(double slope) { return Activation(ActivationTag::PReLU, slope, 0.0); }

Activation Activation::elu(double scale) {
    if (!(scale > 0.0)) throw PreconditionError("elu: scale must be positive");
    return Activation(ActivationTag::ELU, scale, 0.0);
}

Activation Activation::isrlu(double scale) {
    if (!(scale > 0.0)) throw PreconditionError("isrlu: scale must be positive");
    return Activation(ActivationTag::ISRLU, scale, 0.0);
}

Activation Activation::plu(double slope, double knee) {
    if (!(knee > 0.0)) throw PreconditionError("plu: knee must be positive");
    return Activation(ActivationTag::PLU, slope, knee);
}

Activation Activation::sqnl() { return Activation(ActivationTag::SQNL, 0.0, 0.0); }

Activation Activation::space_filling(std::shared_ptr<const SpaceFillingActivation> payload) {
    if (!payload) throw PreconditionError("space_filling activation without payload");
    Activation a(ActivationTag::SpaceFilling, 0.0, 0.0);
    a.payload_ = std::move(payload);
    return a;
}

double Activation::operator()(double s) const {
    switch (tag_) {
        case ActivationTag::ReLU: return s > 0.0 ? s : 0.0;
        case ActivationTag::LeakyReLU:
        case ActivationTag::PReLU: return s > 0.0 ? s : p1_ * s;
        case ActivationTag::ELU: return s > 0.0 ? s : p1_ * (std::exp(s) - 1.0);
        case ActivationTag::ISRLU: return s >= 0.0 ? s : s / std::sqrt(1.0 + p1_ * s * s);
        case ActivationTag::PLU: {
            const double a = p1_, c = p2_;
            if (s < -c) return a * (s + c) - c;
            if (s > c) return a * (s - c) + c;
            return s;
        }
        case ActivationTag::SQNL: {
            if (s <= -2.0) return -1.0;
            if (s <= 0.0) return s + 0.25 * s * s;
            if (s <= 2.0) return s - 0.25 * s * s;
            return 1.0;
        }
        case ActivationTag::SpaceFilling: return payload_->eval(s);
    }
    return 0.0;
}

double Activation::derivative(double s) const {
    switch (tag_) {
        case ActivationTag::ReLU: return s >= 0.0 ? 1.0 : 0.0;
        case ActivationTag::LeakyReLU:
        case ActivationTag::PReLU: return s >= 0.0 ? 1.0 : p1_;
        case ActivationTag::ELU: return s >= 0.0 ? 1.0 : p1_ * std::exp(s);
        case ActivationTag::ISRLU: {
            if (s >= 0.0) return 1.0;
            const double q = 1.0 + p1_ * s * s;
            return 1.0 / (q * std::sqrt(q));
        }
        case ActivationTag::PLU: {
            const double a = p1_, c = p2_;
            if (s < -c) return a;
            if (s < c) return 1.0; // right derivative at -c is the middle slope
            return a;              // right derivative at +c is the outer slope
        }
        case ActivationTag::SQNL: {
            if (s <= -2.0) return 0.0;
            if (s < 0.0) return 1.0 + 0.5 * s;
            if (s < 2.0) return 1.0 - 0.5 * s;
            return 0.0;
        }
        case ActivationTag::SpaceFilling: return payload_->derivative(s);
    }
    return 0.0;
}

std::optional<AffineSegment> Activation::default_segment(bool want_constant) const {
    switch (tag_) {
        case ActivationTag::ReLU:
            if (want_constant) return AffineSegment{-1.0, 1.0, 0.0, 0.0};
            return AffineSegment{1.0, 1.0, 1.0, 0.0};
        case ActivationTag::LeakyReLU:
        case ActivationTag::PReLU:
            if (want_constant) {
                if (p1_ == 0.0) return AffineSegment{-1.0, 1.0, 0.0, 0.0};
                return std::nullopt;
            }
            return AffineSegment{1.0, 1.0, 1.0, 0.0};
        case ActivationTag::ELU:
        case ActivationTag::ISRLU:
            if (want_constant) return std::nullopt;
            return AffineSegment{1.0, 1.0, 1.0, 0.0};
        case ActivationTag::PLU: {
            const double a = p1_, c = p2_;
            if (want_constant) {
                if (a != 0.0) return std::nullopt;
                return AffineSegment{c + 2.0, 1.0, 0.0, c};
            }
            // outer right piece: sigma(s) = a s + c (1 - a); center clear of the knee
            if (a != 0.0) return AffineSegment{c + 2.0, 1.0, a, c * (1.0 - a)};
            // with zero outer slope only the middle piece is nonconstant
            return AffineSegment{0.0, std::min(1.0, c), 1.0, 0.0};
        }
        case ActivationTag::SQNL:
            if (want_constant) return AffineSegment{3.0, 1.0, 0.0, 1.0};
            return std::nullopt; // nowhere affine with nonzero slope
        case ActivationTag::SpaceFilling: {
            // Delegate to the base if its segment survives the modification,
            // i.e. does not meet the perturbed interval.
            auto seg = payload_->base().default_segment(want_constant);
            if (!seg) return std::nullopt;
            if (seg->hi() <= payload_->interval_lo() || seg->lo() >= payload_->interval_hi())
                return seg;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

double Activation::abs_bound(double m) const {
    double best = std::max(std::abs((*this)(-m)), std::abs((*this)(m)));
    for (int i = 0; i <= 4096; ++i) {
        const double s = -m + 2.0 * m * i / 4096.0;
        best = std::max(best, std::abs((*this)(s)));
    }
    return best * (1.0 + 1e-9) + 1e-300;
}

} // namespace landscape

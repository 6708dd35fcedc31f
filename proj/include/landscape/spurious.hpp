#pragma once

#include <vector>

#include "landscape/loss.hpp"
#include "landscape/net.hpp"

namespace landscape {

enum class VariantKind { Nonconstant, Constant };

struct SpuriousVariant {
    VariantKind kind = VariantKind::Nonconstant;
    int constant_layer = 0; // 1-based; meaningful for Constant only
};

// A parameter point whose realization on the data is the best affine (or
// best constant) approximation, pinned inside per-layer affine segments so
// that a whole neighbourhood realizes affine maps only.
struct SpuriousConstruction {
    Architecture arch;
    Parameters params;
    std::vector<AffineSegment> segments; // per hidden layer; constant variant uses only its layer
    AffineMap realization;
    SpuriousVariant variant;
    double input_bound = 0.0;      // max |slope . x| over the support
    double certified_radius = 0.0; // Lipschitz-certified containment radius
    double empirical_radius = 0.0; // largest sampled radius with no violations
    bool radius_vacuous = false;   // certification underflowed
    std::vector<double> first_row; // row 0 of A_1 at the construction
};

// Nonconstant-segment construction: a width-1 signal chain carrying
// slope . x + intercept through every layer's affine window, remaining rows
// pinned to the window centers.
SpuriousConstruction construct_nonconstant(const Architecture& arch,
                                           const std::vector<AffineSegment>& segments,
                                           const std::vector<double>& slope, double intercept,
                                           const FiniteMeasure& mu);

// Constant-segment construction: layer j sits on a constant window, all
// weights vanish, and the output bias carries the constant value.
SpuriousConstruction construct_constant(const Architecture& arch, int constant_layer,
                                        const AffineSegment& segment, double value,
                                        const FiniteMeasure& mu);

// Containment check appropriate for the variant: every layer for the
// nonconstant kind, only the constant layer otherwise. On success the map is
// the realization on the support.
AffineRealization regime_check(const SpuriousConstruction& construction,
                               const Parameters& params, const FiniteMeasure& mu);

// Certified containment radius around `params` (Euclidean, flattened), by
// bisection over a per-layer operator-norm propagation bound.
struct RadiusCertificate {
    double certified = 0.0;
    bool vacuous = false;
};
RadiusCertificate certify_radius(const Architecture& arch, const Parameters& params,
                                 const std::vector<AffineSegment>& segments,
                                 const SpuriousVariant& variant, const FiniteMeasure& mu);

// The affine behaviour of the network in the regime, split into the
// contribution through row 0 of A_1 (gain), the bypass through the remaining
// rows, and the input-independent offset (excluding the output bias):
// psi(x) = bypass . x + gain * (a_1 . x) + offset + b_out.
struct RegimeDecomposition {
    double gain = 0.0;
    std::vector<double> bypass;
    double offset = 0.0;
};
RegimeDecomposition decompose_regime(const Architecture& arch,
                                     const std::vector<AffineSegment>& segments,
                                     const Parameters& params);

// Flat indices that stay free when sampling the equal-realization family; the
// complement (row 0 of A_1 and the output bias for the nonconstant kind, the
// output bias alone for the constant kind) is restored analytically.
std::vector<int> family_free_indices(const Architecture& arch, const SpuriousVariant& variant);

struct FamilySamples {
    std::vector<Parameters> members;
    double delta_used = 0.0;
    int halvings = 0;
};

// Samples the family of parameter points realizing the same map: free
// coordinates move in a delta-ball, the pinned ones are restored so the
// realization is unchanged. Shrinks delta (up to 40 halvings) until every
// sample verifies; throws ScaleTooLargeError if that never happens.
FamilySamples sample_family(const SpuriousConstruction& construction, const FiniteMeasure& mu,
                            int count, double delta, std::uint64_t seed);

// Lifts one family member into a construction of its own (recertifies the
// radius around it).
SpuriousConstruction family_member(const SpuriousConstruction& base, const Parameters& params,
                                   const FiniteMeasure& mu);

} // namespace landscape

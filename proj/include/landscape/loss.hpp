#pragma once

#include <vector>

#include "landscape/matrix.hpp"
#include "landscape/measure.hpp"
#include "landscape/net.hpp"

namespace landscape {

// integral |v - y|^p dmu over the finite support
double loss_value(const LossSpec& spec, const FiniteMeasure& mu,
                  const std::vector<double>& predictions, const Target& target);

// d loss / d prediction_k, one entry per support point
std::vector<double> loss_gradient_predictions(const LossSpec& spec, const FiniteMeasure& mu,
                                              const std::vector<double>& predictions,
                                              const Target& target);

struct BestAffine {
    AffineMap map;
    double loss = 0.0;
    int iterations = 0;
};

// Weighted p-loss minimization over affine maps. p = 2 solves the normal
// equations (minimum-norm for rank-deficient designs); otherwise IRLS with
// step halving, converged when the (slope, intercept) gradient norm <= 1e-10.
BestAffine best_affine(const LossSpec& spec, const FiniteMeasure& mu, const Target& target);

struct BestConstant {
    double value = 0.0;
    double loss = 0.0;
};

BestConstant best_constant(const LossSpec& spec, const FiniteMeasure& mu, const Target& target);

// Exact fittability of the target by affine or constant functions on the
// support, detected up to max-residual 1e-9.
struct TargetClassification {
    bool affine_fit = false;
    bool constant_fit = false;
    AffineMap affine;    // the minimum-norm best affine map (p = 2)
    double constant = 0.0; // the best constant (p = 2)
};

TargetClassification classify_target(const FiniteMeasure& mu, const Target& target);

} // namespace landscape

#pragma once

#include <vector>

#include "landscape/activation.hpp"
#include "landscape/matrix.hpp"
#include "landscape/measure.hpp"

namespace landscape {

// Fully connected feedforward net with one-dimensional output: L hidden
// layers with scalar activations, then an affine output layer.
struct Architecture {
    int input_dim = 0;
    std::vector<int> widths;          // hidden widths w_1..w_L
    std::vector<Activation> activations; // one per hidden layer

    int depth() const { return static_cast<int>(widths.size()); }
    // width of layer i in 0..L+1, where 0 is the input and L+1 the output
    int layer_width(int i) const;
    // total number of scalar parameters
    int param_count() const;
    void validate() const;
};

struct Parameters {
    std::vector<Matrix> weights;             // A_1..A_{L+1}
    std::vector<std::vector<double>> biases; // b_1..b_{L+1}

    static Parameters zeros(const Architecture& arch);
    void check_shapes(const Architecture& arch) const;
};

// x -> slope . x + intercept
struct AffineMap {
    std::vector<double> slope;
    double intercept = 0.0;

    double operator()(const std::vector<double>& x) const;
};

struct ForwardTrace {
    // inputs[i]: activations entering layer i+1 (inputs[0] is x)
    std::vector<std::vector<double>> inputs;
    // pre[i]: pre-activation of hidden layer i+1
    std::vector<std::vector<double>> pre;
    double output = 0.0;
};

double forward(const Architecture& arch, const Parameters& params, const std::vector<double>& x);
ForwardTrace forward_trace(const Architecture& arch, const Parameters& params,
                           const std::vector<double>& x);
std::vector<double> forward_all(const Architecture& arch, const Parameters& params,
                                const FiniteMeasure& mu);

// Flattening order: layer by layer, A row-major then b. Row 0 of A_1 and the
// output bias sit at fixed places, which the reduced-coordinate sampling in
// spurious.cpp relies on.
std::vector<double> flatten(const Architecture& arch, const Parameters& params);
Parameters unflatten(const Architecture& arch, const std::vector<double>& flat);

// Gradient of sum_k coeff_k * psi(params, x_k) in flattened order, by reverse
// accumulation. Activation derivatives take the right branch at kinks.
std::vector<double> weighted_output_gradient(const Architecture& arch, const Parameters& params,
                                             const FiniteMeasure& mu,
                                             const std::vector<double>& coeffs);

// Gradient of the p-loss against a target, in flattened order.
std::vector<double> param_gradient(const Architecture& arch, const Parameters& params,
                                   const FiniteMeasure& mu, const Target& target,
                                   const LossSpec& spec);

struct RegimeViolation {
    int layer = 0;  // 1-based hidden layer
    int sample = 0; // index into the measure
    double margin = 0.0; // segment radius minus attained distance; negative when violated
};

struct AffineRealization {
    bool in_regime = false;
    AffineMap map;
    RegimeViolation violation;
};

// If every pre-activation over the measure stays strictly inside its layer's
// segment (with a 1e-12 relative guard), the network restricted to the data
// is affine; returns that map, otherwise the first violation encountered.
AffineRealization affine_realization(const Architecture& arch, const Parameters& params,
                                     const std::vector<AffineSegment>& segments,
                                     const FiniteMeasure& mu);

} // namespace landscape

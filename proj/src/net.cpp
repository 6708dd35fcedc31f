#include "landscape/net.hpp"

#include <cmath>

#include "landscape/loss.hpp"

namespace landscape {

int Architecture::layer_width(int i) const {
    if (i == 0) return input_dim;
    if (i == depth() + 1) return 1;
    return widths[static_cast<std::size_t>(i - 1)];
}

int Architecture::param_count() const {
    int m = 0;
    for (int i = 1; i <= depth() + 1; ++i) m += layer_width(i) * (layer_width(i - 1) + 1);
    return m;
}

void Architecture::validate() const {
    if (input_dim < 1) throw ShapeError("architecture: input_dim must be >= 1");
    if (widths.empty()) throw ShapeError("architecture: need at least one hidden layer");
    for (int w : widths)
        if (w < 1) throw ShapeError("architecture: hidden widths must be >= 1");
    if (activations.size() != widths.size())
        throw ShapeError("architecture: one activation per hidden layer required");
}

Parameters Parameters::zeros(const Architecture& arch) {
    arch.validate();
    Parameters p;
    for (int i = 1; i <= arch.depth() + 1; ++i) {
        p.weights.emplace_back(arch.layer_width(i), arch.layer_width(i - 1));
        p.biases.emplace_back(static_cast<std::size_t>(arch.layer_width(i)), 0.0);
    }
    return p;
}

void Parameters::check_shapes(const Architecture& arch) const {
    const std::size_t layers = static_cast<std::size_t>(arch.depth()) + 1;
    if (weights.size() != layers || biases.size() != layers)
        throw ShapeError("parameters: wrong number of layers");
    for (int i = 1; i <= arch.depth() + 1; ++i) {
        const Matrix& a = weights[static_cast<std::size_t>(i - 1)];
        if (a.rows != arch.layer_width(i) || a.cols != arch.layer_width(i - 1))
            throw ShapeError("parameters: weight shape mismatch at layer " + std::to_string(i));
        if (static_cast<int>(biases[static_cast<std::size_t>(i - 1)].size()) != arch.layer_width(i))
            throw ShapeError("parameters: bias shape mismatch at layer " + std::to_string(i));
    }
}

double AffineMap::operator()(const std::vector<double>& x) const {
    if (x.size() != slope.size()) throw ShapeError("affine map applied to wrong dimension");
    double acc = intercept;
    for (std::size_t i = 0; i < slope.size(); ++i) acc += slope[i] * x[i];
    return acc;
}

ForwardTrace forward_trace(const Architecture& arch, const Parameters& params,
                           const std::vector<double>& x) {
    params.check_shapes(arch);
    if (static_cast<int>(x.size()) != arch.input_dim)
        throw ShapeError("forward: input dimension mismatch");
    ForwardTrace trace;
    trace.inputs.push_back(x);
    std::vector<double> z = x;
    for (int i = 1; i <= arch.depth(); ++i) {
        const Matrix& a = params.weights[static_cast<std::size_t>(i - 1)];
        const std::vector<double>& b = params.biases[static_cast<std::size_t>(i - 1)];
        std::vector<double> h = a.apply(z);
        for (std::size_t j = 0; j < h.size(); ++j) h[j] += b[j];
        trace.pre.push_back(h);
        const Activation& act = arch.activations[static_cast<std::size_t>(i - 1)];
        for (double& v : h) v = act(v);
        trace.inputs.push_back(h);
        z = std::move(h);
    }
    const Matrix& out_w = params.weights.back();
    trace.output = params.biases.back().front();
    for (int j = 0; j < out_w.cols; ++j) trace.output += out_w(0, j) * z[static_cast<std::size_t>(j)];
    return trace;
}

double forward(const Architecture& arch, const Parameters& params, const std::vector<double>& x) {
    return forward_trace(arch, params, x).output;
}

std::vector<double> forward_all(const Architecture& arch, const Parameters& params,
                                const FiniteMeasure& mu) {
    std::vector<double> out(static_cast<std::size_t>(mu.size()));
    for (int k = 0; k < mu.size(); ++k)
        out[static_cast<std::size_t>(k)] = forward(arch, params, mu.points[static_cast<std::size_t>(k)]);
    return out;
}

std::vector<double> flatten(const Architecture& arch, const Parameters& params) {
    params.check_shapes(arch);
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(arch.param_count()));
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        const Matrix& a = params.weights[i];
        flat.insert(flat.end(), a.data.begin(), a.data.end());
        flat.insert(flat.end(), params.biases[i].begin(), params.biases[i].end());
    }
    return flat;
}

Parameters unflatten(const Architecture& arch, const std::vector<double>& flat) {
    if (static_cast<int>(flat.size()) != arch.param_count())
        throw ShapeError("unflatten: wrong flat length");
    Parameters p = Parameters::zeros(arch);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        Matrix& a = p.weights[i];
        for (double& v : a.data) v = flat[pos++];
        for (double& v : p.biases[i]) v = flat[pos++];
    }
    return p;
}

std::vector<double> weighted_output_gradient(const Architecture& arch, const Parameters& params,
                                             const FiniteMeasure& mu,
                                             const std::vector<double>& coeffs) {
    params.check_shapes(arch);
    if (static_cast<int>(coeffs.size()) != mu.size())
        throw ShapeError("weighted_output_gradient: coefficient count mismatch");
    Parameters grad = Parameters::zeros(arch);
    const int L = arch.depth();
    for (int k = 0; k < mu.size(); ++k) {
        const double ck = coeffs[static_cast<std::size_t>(k)];
        if (ck == 0.0) continue;
        const ForwardTrace trace = forward_trace(arch, params, mu.points[static_cast<std::size_t>(k)]);
        // output layer
        std::vector<double> delta{ck};
        {
            Matrix& ga = grad.weights.back();
            const std::vector<double>& z = trace.inputs.back();
            for (int j = 0; j < ga.cols; ++j) ga(0, j) += ck * z[static_cast<std::size_t>(j)];
            grad.biases.back()[0] += ck;
        }
        // hidden layers, backwards
        std::vector<double> upstream = delta;
        for (int i = L; i >= 1; --i) {
            const Matrix& a_next = params.weights[static_cast<std::size_t>(i)];
            std::vector<double> d = a_next.apply_transposed(upstream);
            const Activation& act = arch.activations[static_cast<std::size_t>(i - 1)];
            const std::vector<double>& pre = trace.pre[static_cast<std::size_t>(i - 1)];
            for (std::size_t j = 0; j < d.size(); ++j) d[j] *= act.derivative(pre[j]);
            Matrix& ga = grad.weights[static_cast<std::size_t>(i - 1)];
            std::vector<double>& gb = grad.biases[static_cast<std::size_t>(i - 1)];
            const std::vector<double>& z = trace.inputs[static_cast<std::size_t>(i - 1)];
            for (int r = 0; r < ga.rows; ++r) {
                const double dr = d[static_cast<std::size_t>(r)];
                gb[static_cast<std::size_t>(r)] += dr;
                for (int c = 0; c < ga.cols; ++c) ga(r, c) += dr * z[static_cast<std::size_t>(c)];
            }
            upstream = std::move(d);
        }
    }
    return flatten(arch, grad);
}

std::vector<double> param_gradient(const Architecture& arch, const Parameters& params,
                                   const FiniteMeasure& mu, const Target& target,
                                   const LossSpec& spec) {
    const std::vector<double> predictions = forward_all(arch, params, mu);
    const std::vector<double> coeffs = loss_gradient_predictions(spec, mu, predictions, target);
    return weighted_output_gradient(arch, params, mu, coeffs);
}

AffineRealization affine_realization(const Architecture& arch, const Parameters& params,
                                     const std::vector<AffineSegment>& segments,
                                     const FiniteMeasure& mu) {
    params.check_shapes(arch);
    if (static_cast<int>(segments.size()) != arch.depth())
        throw ShapeError("affine_realization: one segment per hidden layer required");
    if (mu.dim() != arch.input_dim) throw ShapeError("affine_realization: measure dimension mismatch");
    AffineRealization result;
    for (int k = 0; k < mu.size(); ++k) {
        const ForwardTrace trace = forward_trace(arch, params, mu.points[static_cast<std::size_t>(k)]);
        for (int i = 1; i <= arch.depth(); ++i) {
            const AffineSegment& seg = segments[static_cast<std::size_t>(i - 1)];
            const double guard = seg.radius * (1.0 - 1e-12);
            for (double h : trace.pre[static_cast<std::size_t>(i - 1)]) {
                const double dist = std::abs(h - seg.center);
                if (!(dist < guard)) {
                    result.in_regime = false;
                    result.violation = RegimeViolation{i, k, seg.radius - dist};
                    return result;
                }
            }
        }
    }
    // Inside the regime each layer acts as z -> beta (A z + b) + gamma. Fold
    // the chain into a single affine map.
    Matrix s = params.weights.front();
    std::vector<double> t = params.biases.front();
    {
        const AffineSegment& seg = segments.front();
        for (double& v : s.data) v *= seg.slope;
        for (double& v : t) v = seg.slope * v + seg.offset;
    }
    for (int i = 2; i <= arch.depth(); ++i) {
        const AffineSegment& seg = segments[static_cast<std::size_t>(i - 1)];
        const Matrix& a = params.weights[static_cast<std::size_t>(i - 1)];
        const std::vector<double>& b = params.biases[static_cast<std::size_t>(i - 1)];
        Matrix s_next = a.multiply(s);
        std::vector<double> t_next = a.apply(t);
        for (int r = 0; r < s_next.rows; ++r) {
            for (int c = 0; c < s_next.cols; ++c) s_next(r, c) *= seg.slope;
            t_next[static_cast<std::size_t>(r)] =
                seg.slope * (t_next[static_cast<std::size_t>(r)] + b[static_cast<std::size_t>(r)]) +
                seg.offset;
        }
        s = std::move(s_next);
        t = std::move(t_next);
    }
    const Matrix& out_w = params.weights.back();
    result.in_regime = true;
    result.map.slope.assign(static_cast<std::size_t>(arch.input_dim), 0.0);
    for (int c = 0; c < arch.input_dim; ++c) {
        double acc = 0.0;
        for (int j = 0; j < out_w.cols; ++j) acc += out_w(0, j) * s(j, c);
        result.map.slope[static_cast<std::size_t>(c)] = acc;
    }
    result.map.intercept = params.biases.back().front();
    for (int j = 0; j < out_w.cols; ++j)
        result.map.intercept += out_w(0, j) * t[static_cast<std::size_t>(j)];
    return result;
}

} // namespace landscape

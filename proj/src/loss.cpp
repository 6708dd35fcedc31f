#include "landscape/loss.hpp"

#include <algorithm>
#include <cmath>

namespace landscape {

namespace {

void check_aligned(const FiniteMeasure& mu, const std::vector<double>& predictions,
                   const Target& target) {
    if (static_cast<int>(predictions.size()) != mu.size() ||
        static_cast<int>(target.values.size()) != mu.size())
        throw ShapeError("loss: predictions/target not aligned with measure");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// design row (x_k, 1)
std::vector<double> design_row(const std::vector<double>& x) {
    std::vector<double> row = x;
    row.push_back(1.0);
    return row;
}

// Weighted least squares theta = argmin sum omega_k (theta . d_k - y_k)^2,
// minimum-norm via pseudo-inverse of the normal matrix.
std::vector<double> weighted_ls(const FiniteMeasure& mu, const Target& target,
                                const std::vector<double>& omega) {
    const int dim = mu.dim() + 1;
    Matrix gram(dim, dim);
    std::vector<double> rhs(static_cast<std::size_t>(dim), 0.0);
    for (int k = 0; k < mu.size(); ++k) {
        const std::vector<double> d = design_row(mu.points[static_cast<std::size_t>(k)]);
        const double w = omega[static_cast<std::size_t>(k)];
        for (int i = 0; i < dim; ++i) {
            rhs[static_cast<std::size_t>(i)] +=
                w * d[static_cast<std::size_t>(i)] * target.values[static_cast<std::size_t>(k)];
            for (int j = 0; j < dim; ++j)
                gram(i, j) += w * d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)];
        }
    }
    return solve_symmetric_min_norm(gram, rhs);
}

double affine_loss(const LossSpec& spec, const FiniteMeasure& mu, const Target& target,
                   const std::vector<double>& theta) {
    double acc = 0.0;
    for (int k = 0; k < mu.size(); ++k) {
        const std::vector<double>& x = mu.points[static_cast<std::size_t>(k)];
        double v = theta.back();
        for (int i = 0; i < mu.dim(); ++i)
            v += theta[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        acc += mu.weights[static_cast<std::size_t>(k)] *
               std::pow(std::abs(v - target.values[static_cast<std::size_t>(k)]), spec.p);
    }
    return acc;
}

std::vector<double> affine_loss_gradient(const LossSpec& spec, const FiniteMeasure& mu,
                                         const Target& target, const std::vector<double>& theta) {
    std::vector<double> grad(theta.size(), 0.0);
    for (int k = 0; k < mu.size(); ++k) {
        const std::vector<double> d = design_row(mu.points[static_cast<std::size_t>(k)]);
        double v = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) v += theta[i] * d[i];
        const double r = v - target.values[static_cast<std::size_t>(k)];
        const double g = mu.weights[static_cast<std::size_t>(k)] * spec.p * sign(r) *
                         std::pow(std::abs(r), spec.p - 1.0);
        for (std::size_t i = 0; i < theta.size(); ++i) grad[i] += g * d[i];
    }
    return grad;
}

double norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

} // namespace

double loss_value(const LossSpec& spec, const FiniteMeasure& mu,
                  const std::vector<double>& predictions, const Target& target) {
    spec.validate();
    check_aligned(mu, predictions, target);
    double acc = 0.0;
    for (int k = 0; k < mu.size(); ++k)
        acc += mu.weights[static_cast<std::size_t>(k)] *
               std::pow(std::abs(predictions[static_cast<std::size_t>(k)] -
                                 target.values[static_cast<std::size_t>(k)]),
                        spec.p);
    return acc;
}

std::vector<double> loss_gradient_predictions(const LossSpec& spec, const FiniteMeasure& mu,
                                              const std::vector<double>& predictions,
                                              const Target& target) {
    spec.validate();
    check_aligned(mu, predictions, target);
    std::vector<double> grad(predictions.size(), 0.0);
    for (int k = 0; k < mu.size(); ++k) {
        const double r = predictions[static_cast<std::size_t>(k)] -
                         target.values[static_cast<std::size_t>(k)];
        grad[static_cast<std::size_t>(k)] = mu.weights[static_cast<std::size_t>(k)] * spec.p *
                                            sign(r) * std::pow(std::abs(r), spec.p - 1.0);
    }
    return grad;
}

BestAffine best_affine(const LossSpec& spec, const FiniteMeasure& mu, const Target& target) {
    spec.validate();
    if (static_cast<int>(target.values.size()) != mu.size())
        throw ShapeError("best_affine: target not aligned with measure");
    const std::size_t n = static_cast<std::size_t>(mu.size());

    // p = 2 normal equations; also the IRLS starting point.
    std::vector<double> theta = weighted_ls(mu, target, mu.weights);
    int iterations = 0;
    if (spec.p != 2.0) {
        double f = affine_loss(spec, mu, target, theta);
        for (iterations = 1; iterations <= 500; ++iterations) {
            if (norm(affine_loss_gradient(spec, mu, target, theta)) <= 1e-10) break;
            std::vector<double> omega(n);
            for (int k = 0; k < mu.size(); ++k) {
                const std::vector<double>& x = mu.points[static_cast<std::size_t>(k)];
                double v = theta.back();
                for (int i = 0; i < mu.dim(); ++i)
                    v += theta[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
                const double r = std::max(std::abs(v - target.values[static_cast<std::size_t>(k)]),
                                          1e-150);
                omega[static_cast<std::size_t>(k)] =
                    mu.weights[static_cast<std::size_t>(k)] * std::pow(r, spec.p - 2.0);
            }
            const std::vector<double> proposal = weighted_ls(mu, target, omega);
            // step halving towards the IRLS proposal until the loss decreases
            double t = 1.0;
            bool moved = false;
            for (int h = 0; h < 60; ++h, t *= 0.5) {
                std::vector<double> trial(theta.size());
                for (std::size_t i = 0; i < theta.size(); ++i)
                    trial[i] = theta[i] + t * (proposal[i] - theta[i]);
                const double ft = affine_loss(spec, mu, target, trial);
                if (ft < f) {
                    theta = std::move(trial);
                    f = ft;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
    }
    BestAffine out;
    out.map.slope.assign(theta.begin(), theta.end() - 1);
    out.map.intercept = theta.back();
    out.loss = affine_loss(spec, mu, target, theta);
    out.iterations = iterations;
    return out;
}

BestConstant best_constant(const LossSpec& spec, const FiniteMeasure& mu, const Target& target) {
    spec.validate();
    if (static_cast<int>(target.values.size()) != mu.size())
        throw ShapeError("best_constant: target not aligned with measure");
    double lo = target.values.front(), hi = target.values.front();
    for (double y : target.values) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    // The p-loss in c is strictly convex; bisect its derivative.
    auto deriv = [&](double c) {
        double acc = 0.0;
        for (int k = 0; k < mu.size(); ++k) {
            const double r = c - target.values[static_cast<std::size_t>(k)];
            acc += mu.weights[static_cast<std::size_t>(k)] * spec.p * sign(r) *
                   std::pow(std::abs(r), spec.p - 1.0);
        }
        return acc;
    };
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (deriv(mid) >= 0.0) hi = mid;
        else lo = mid;
    }
    BestConstant out;
    out.value = 0.5 * (lo + hi);
    const std::vector<double> constant(static_cast<std::size_t>(mu.size()), out.value);
    out.loss = loss_value(spec, mu, constant, target);
    return out;
}

TargetClassification classify_target(const FiniteMeasure& mu, const Target& target) {
    const LossSpec l2{2.0};
    TargetClassification out;
    const BestAffine affine = best_affine(l2, mu, target);
    const BestConstant constant = best_constant(l2, mu, target);
    out.affine = affine.map;
    out.constant = constant.value;
    double max_affine_res = 0.0, max_constant_res = 0.0;
    for (int k = 0; k < mu.size(); ++k) {
        const double y = target.values[static_cast<std::size_t>(k)];
        max_affine_res =
            std::max(max_affine_res, std::abs(affine.map(mu.points[static_cast<std::size_t>(k)]) - y));
        max_constant_res = std::max(max_constant_res, std::abs(constant.value - y));
    }
    out.affine_fit = max_affine_res <= 1e-9;
    out.constant_fit = max_constant_res <= 1e-9;
    return out;
}

} // namespace landscape

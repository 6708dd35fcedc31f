#include "landscape/measure.hpp"

#include <algorithm>
#include <cmath>

namespace landscape {

namespace {

void check_rows(const std::vector<std::vector<double>>& pts) {
    if (pts.empty()) throw EmptyDomainError("measure needs at least one point");
    const std::size_t d = pts.front().size();
    if (d == 0) throw PreconditionError("measure points must have dimension >= 1");
    for (const auto& p : pts) {
        if (p.size() != d) throw ShapeError("measure points have mixed dimensions");
        for (double v : p)
            if (!std::isfinite(v)) throw PreconditionError("measure point is not finite");
    }
}

} // namespace

FiniteMeasure FiniteMeasure::from_points(std::vector<std::vector<double>> pts,
                                         std::vector<double> w) {
    check_rows(pts);
    if (w.empty()) w.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
    if (w.size() != pts.size()) throw ShapeError("weights do not match points");
    FiniteMeasure mu;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(w[i] > 0.0)) throw PreconditionError("weights must be strictly positive");
        auto it = std::find(mu.points.begin(), mu.points.end(), pts[i]);
        if (it == mu.points.end()) {
            mu.points.push_back(std::move(pts[i]));
            mu.weights.push_back(w[i]);
        } else {
            mu.weights[static_cast<std::size_t>(it - mu.points.begin())] += w[i];
        }
    }
    return mu;
}

double FiniteMeasure::total_mass() const {
    double acc = 0.0;
    for (double w : weights) acc += w;
    return acc;
}

double FiniteMeasure::support_radius() const {
    double best = 0.0;
    for (const auto& p : points) {
        double norm_sq = 0.0;
        for (double v : p) norm_sq += v * v;
        best = std::max(best, norm_sq);
    }
    return std::sqrt(best);
}

std::pair<FiniteMeasure, Target> make_dataset(std::vector<std::vector<double>> pts,
                                              std::vector<double> values,
                                              std::vector<double> weights) {
    check_rows(pts);
    if (values.size() != pts.size()) throw ShapeError("target values do not match points");
    if (weights.empty()) weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
    if (weights.size() != pts.size()) throw ShapeError("weights do not match points");
    FiniteMeasure mu;
    Target y;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(weights[i] > 0.0)) throw PreconditionError("weights must be strictly positive");
        if (!std::isfinite(values[i])) throw PreconditionError("target value is not finite");
        auto it = std::find(mu.points.begin(), mu.points.end(), pts[i]);
        if (it == mu.points.end()) {
            mu.points.push_back(std::move(pts[i]));
            mu.weights.push_back(weights[i]);
            y.values.push_back(values[i]);
        } else {
            const std::size_t j = static_cast<std::size_t>(it - mu.points.begin());
            if (y.values[j] != values[i])
                throw PreconditionError("duplicate point with conflicting target values");
            mu.weights[j] += weights[i];
        }
    }
    return {std::move(mu), std::move(y)};
}

} // namespace landscape

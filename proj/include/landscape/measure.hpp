#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "landscape/errors.hpp"

namespace landscape {

// Finitely supported measure on R^d: distinct points with positive weights.
// Construction merges exact duplicate points by adding their weights.
struct FiniteMeasure {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;

    static FiniteMeasure from_points(std::vector<std::vector<double>> pts,
                                     std::vector<double> w = {});

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
    double total_mass() const;
    // max Euclidean norm over the support
    double support_radius() const;
};

struct Target {
    std::vector<double> values;
};

// Paired ingestion: merges rows with identical (point, value), summing their
// weights, and rejects rows that assign two different values to one point.
// Empty weights mean uniform 1/n over the raw rows.
std::pair<FiniteMeasure, Target> make_dataset(std::vector<std::vector<double>> pts,
                                              std::vector<double> values,
                                              std::vector<double> weights = {});

// L^p loss with p in (1, infinity).
struct LossSpec {
    double p = 2.0;

    void validate() const {
        if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("loss exponent must be finite and > 1");
    }
};

} // namespace landscape

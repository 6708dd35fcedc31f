#pragma once

#include <functional>
#include <vector>

#include "landscape/rng.hpp"

namespace landscape {

// f(x) with gradient written into grad (same length as x).
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct DescentOptions {
    int max_iters = 1000;
    double grad_tol = 1e-12;
    double initial_step = 1e-2;
};

struct DescentResult {
    std::vector<double> x;
    double f = 0.0;
    double grad_norm = 0.0;
    int iters = 0;
};

// Gradient descent with Barzilai-Borwein step sizes and Armijo backtracking.
DescentResult gradient_descent(const Objective& objective, std::vector<double> x0,
                               const DescentOptions& opts = {});

struct MultistartResult {
    DescentResult best;
    int best_restart = -1;
    std::vector<DescentResult> all;
};

// Runs `restarts` descents from init(restart_index, rng) with per-restart
// derived rng streams; the winner is the lowest f, ties broken by restart
// index, so the result does not depend on the thread count.
MultistartResult multistart_descent(int restarts, int threads, std::uint64_t seed,
                                    const std::function<std::vector<double>(int, Rng&)>& init,
                                    const Objective& objective, const DescentOptions& opts = {});

// Minimizes a 1-d function on [lo, hi] by golden section.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol, double* fmin = nullptr);

// Chunked index-parallel map; work item i must be independent of the others.
void parallel_for(int n, int threads, const std::function<void(int)>& work);

} // namespace landscape

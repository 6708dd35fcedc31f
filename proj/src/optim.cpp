#include "landscape/optim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace landscape {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace

DescentResult gradient_descent(const Objective& objective, std::vector<double> x0,
                               const DescentOptions& opts) {
    const std::size_t n = x0.size();
    std::vector<double> grad(n, 0.0), prev_x, prev_grad;
    double f = objective(x0, grad);
    double step = opts.initial_step;
    DescentResult res;
    res.x = x0;
    res.f = f;
    res.grad_norm = std::sqrt(dot(grad, grad));
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        const double gnorm = std::sqrt(dot(grad, grad));
        if (gnorm <= opts.grad_tol || !std::isfinite(f)) break;
        // Barzilai-Borwein step from the previous pair, clamped to sane range
        if (!prev_x.empty()) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double si = x0[i] - prev_x[i];
                const double yi = grad[i] - prev_grad[i];
                sy += si * yi;
                ss += si * si;
            }
            if (sy > 0.0 && ss > 0.0) step = std::clamp(ss / sy, 1e-12, 1e6);
        }
        prev_x = x0;
        prev_grad = grad;
        // Armijo backtracking along -grad
        double t = step;
        bool accepted = false;
        for (int back = 0; back < 60; ++back, t *= 0.5) {
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = x0[i] - t * grad[i];
            std::vector<double> trial_grad(n, 0.0);
            const double ft = objective(trial, trial_grad);
            if (std::isfinite(ft) && ft <= f - 1e-4 * t * gnorm * gnorm) {
                x0 = std::move(trial);
                grad = std::move(trial_grad);
                f = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    res.x = x0;
    res.f = f;
    res.grad_norm = std::sqrt(dot(grad, grad));
    res.iters = it;
    return res;
}

MultistartResult multistart_descent(int restarts, int threads, std::uint64_t seed,
                                    const std::function<std::vector<double>(int, Rng&)>& init,
                                    const Objective& objective, const DescentOptions& opts) {
    MultistartResult out;
    out.all.resize(static_cast<std::size_t>(restarts));
    const Rng master(seed);
    parallel_for(restarts, threads, [&](int r) {
        Rng rng = master.derive(static_cast<std::uint64_t>(r));
        out.all[static_cast<std::size_t>(r)] = gradient_descent(objective, init(r, rng), opts);
    });
    for (int r = 0; r < restarts; ++r) {
        const DescentResult& d = out.all[static_cast<std::size_t>(r)];
        if (out.best_restart < 0 || d.f < out.best.f) {
            out.best = d;
            out.best_restart = r;
        }
    }
    return out;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi, double tol,
                          double* fmin) {
    const double gr = 0.6180339887498948482;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (lo + hi);
    if (fmin) *fmin = f(xm);
    return xm;
}

void parallel_for(int n, int threads, const std::function<void(int)>& work) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) work(i);
        return;
    }
    const int used = std::min(threads, n);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(used));
    for (int t = 0; t < used; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace landscape

#include "landscape/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "landscape/optim.hpp"
#include "landscape/verify.hpp"

namespace landscape {

std::vector<double> isotonic_fit(const std::vector<double>& y, bool nonincreasing) {
    const std::size_t n = y.size();
    if (n == 0) return {};
    // blocks with value = mean, pooled while adjacent means violate order
    std::vector<double> value(n), weight(n);
    std::vector<std::size_t> size(n);
    std::size_t blocks = 0;
    const double sign = nonincreasing ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        value[blocks] = sign * y[i];
        weight[blocks] = 1.0;
        size[blocks] = 1;
        ++blocks;
        while (blocks > 1 && value[blocks - 2] >= value[blocks - 1]) {
            const double w = weight[blocks - 2] + weight[blocks - 1];
            value[blocks - 2] =
                (weight[blocks - 2] * value[blocks - 2] + weight[blocks - 1] * value[blocks - 1]) / w;
            weight[blocks - 2] = w;
            size[blocks - 2] += size[blocks - 1];
            --blocks;
        }
    }
    std::vector<double> fit(n);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t i = 0; i < size[b]; ++i) fit[pos++] = sign * value[b];
    return fit;
}

bool is_monotone(const std::vector<double>& v, double tol) {
    bool up = true, down = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1] - tol) up = false;
        if (v[i] > v[i - 1] + tol) down = false;
    }
    return up || down;
}

MonotoneProjection monotone_distance(const std::vector<double>& u) {
    if (u.empty()) throw PreconditionError("monotone_distance: empty vector");
    MonotoneProjection out;
    double dist[2];
    std::vector<double> fit[2];
    for (int o = 0; o < 2; ++o) {
        fit[o] = isotonic_fit(u, o == 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            acc += (u[i] - fit[o][i]) * (u[i] - fit[o][i]);
        dist[o] = acc;
    }
    const double best = std::min(dist[0], dist[1]);
    out.distance_sq = best;
    const double tie_tol = 1e-12 * std::max(1.0, best);
    for (int o = 0; o < 2; ++o)
        if (dist[o] <= best + tie_tol) {
            // skip an exact duplicate (u already monotone both ways)
            if (!out.minimizers.empty() && out.minimizers.front() == fit[o]) continue;
            out.minimizers.push_back(fit[o]);
        }
    return out;
}

ImageCloud sample_image(const Architecture& arch, const FiniteMeasure& mu, int draws, double w_lo,
                        double w_hi, double b_lo, double b_hi, std::uint64_t seed, int threads) {
    arch.validate();
    if (draws < 1) throw PreconditionError("sample_image: need at least one draw");
    ImageCloud cloud;
    cloud.rows.assign(static_cast<std::size_t>(draws), {});
    const Rng master(seed);
    parallel_for(draws, threads, [&](int i) {
        Rng rng = master.derive(static_cast<std::uint64_t>(i));
        Parameters p = Parameters::zeros(arch);
        for (std::size_t l = 0; l < p.weights.size(); ++l) {
            for (double& v : p.weights[l].data) v = rng.uniform(w_lo, w_hi);
            for (double& v : p.biases[l]) v = rng.uniform(b_lo, b_hi);
        }
        cloud.rows[static_cast<std::size_t>(i)] = forward_all(arch, p, mu);
    });
    return cloud;
}

bool monotone_one_unit(const Architecture& arch) {
    for (int w : arch.widths)
        if (w != 1) return false;
    for (const Activation& act : arch.activations) {
        switch (act.tag()) {
            case ActivationTag::ReLU:
            case ActivationTag::ELU:
            case ActivationTag::ISRLU:
            case ActivationTag::SQNL: break;
            case ActivationTag::LeakyReLU:
            case ActivationTag::PReLU:
            case ActivationTag::PLU:
                if (act.param1() < 0.0) return false;
                break;
            case ActivationTag::SpaceFilling: return false;
        }
    }
    return true;
}

ProjectionResult project_multistart(const Architecture& arch, const FiniteMeasure& mu,
                                    const std::vector<double>& u, int restarts,
                                    std::uint64_t seed, int threads) {
    if (static_cast<int>(u.size()) != mu.size())
        throw ShapeError("project_multistart: target length mismatch");
    ProjectionResult out;
    out.restarts = restarts;

    FiniteMeasure unit = mu;
    std::fill(unit.weights.begin(), unit.weights.end(), 1.0);
    const Target ty{u};
    const LossSpec l2{2.0};
    const Objective objective = [&arch, &unit, &ty, &l2](const std::vector<double>& flat,
                                                         std::vector<double>& grad) -> double {
        const Parameters p = unflatten(arch, flat);
        grad = param_gradient(arch, p, unit, ty, l2);
        return loss_value(l2, unit, forward_all(arch, p, unit), ty);
    };
    const MultistartResult ms = multistart_descent(
        restarts, threads, seed,
        [&arch](int, Rng& rng) {
            Parameters p = Parameters::zeros(arch);
            for (std::size_t l = 0; l < p.weights.size(); ++l) {
                for (double& v : p.weights[l].data) v = rng.uniform(-10.0, 10.0);
                for (double& v : p.biases[l]) v = rng.uniform(-5.0, 5.0);
            }
            return flatten(arch, p);
        },
        objective, DescentOptions{800, 1e-13, 1e-2});

    out.distance_sq = ms.best.f;
    // cluster near-optimal prediction vectors
    for (int r = 0; r < restarts; ++r) {
        const DescentResult& d = ms.all[static_cast<std::size_t>(r)];
        if (!(d.f <= ms.best.f + 1e-6)) continue;
        const std::vector<double> preds =
            forward_all(arch, unflatten(arch, d.x), unit);
        bool matched = false;
        for (std::size_t c = 0; c < out.minimizers.size(); ++c) {
            double gap = 0.0;
            for (std::size_t i = 0; i < preds.size(); ++i)
                gap += (preds[i] - out.minimizers[c][i]) * (preds[i] - out.minimizers[c][i]);
            if (std::sqrt(gap) <= 0.05) {
                ++out.cluster_counts[c];
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.minimizers.push_back(preds);
            out.cluster_counts.push_back(1);
        }
    }
    if (monotone_one_unit(arch)) {
        out.oracle_used = true;
        out.oracle_distance_sq = monotone_distance(u).distance_sq;
    }
    return out;
}

ScanResult discontinuity_scan(const Architecture& arch, const FiniteMeasure& mu,
                              const std::vector<std::vector<double>>& waypoints,
                              int points_per_segment, int restarts, std::uint64_t seed,
                              int threads) {
    if (waypoints.size() < 2) throw PreconditionError("discontinuity_scan: need at least two waypoints");
    if (points_per_segment < 1) throw PreconditionError("discontinuity_scan: need a positive grid");
    ScanResult out;
    const int segments = static_cast<int>(waypoints.size()) - 1;
    for (int s = 0; s < segments; ++s) {
        const std::vector<double>& a = waypoints[static_cast<std::size_t>(s)];
        const std::vector<double>& b = waypoints[static_cast<std::size_t>(s + 1)];
        if (a.size() != b.size()) throw ShapeError("discontinuity_scan: waypoint size mismatch");
        const int first = s == 0 ? 0 : 1; // avoid duplicating interior waypoints
        for (int i = first; i <= points_per_segment; ++i) {
            const double lam = static_cast<double>(i) / points_per_segment;
            ScanPoint pt;
            pt.t = (s + lam) / segments;
            pt.target.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j)
                pt.target[j] = (1.0 - lam) * a[j] + lam * b[j];
            // Same seed at every path point (common random starts): near a tie the
            // argmin then flips exactly once instead of flickering with the draws.
            const ProjectionResult proj =
                project_multistart(arch, mu, pt.target, restarts, seed, threads);
            pt.distance_sq = proj.distance_sq;
            pt.minimizer = proj.minimizers.empty() ? pt.target : proj.minimizers.front();
            out.points.push_back(std::move(pt));
        }
    }
    for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
        const ScanPoint& a = out.points[i];
        const ScanPoint& b = out.points[i + 1];
        if (std::abs(b.t - a.t) > 1e-2 + 1e-15) continue;
        double gap = 0.0;
        for (std::size_t j = 0; j < a.minimizer.size(); ++j)
            gap += (a.minimizer[j] - b.minimizer[j]) * (a.minimizer[j] - b.minimizer[j]);
        gap = std::sqrt(gap);
        if (gap >= 0.1) out.jumps.push_back(ScanJump{static_cast<int>(i), gap});
    }
    return out;
}

NonconvexityCertificate nonconvexity_certificate(const Architecture& arch,
                                                 const FiniteMeasure& mu, const ImageCloud& cloud,
                                                 int pairs, int restarts, std::uint64_t seed,
                                                 int threads) {
    if (cloud.rows.size() < 2)
        throw PreconditionError("nonconvexity_certificate: need at least two cloud points");
    NonconvexityCertificate best;
    best.certified = monotone_one_unit(arch);
    Rng rng(seed);
    const int n = static_cast<int>(cloud.rows.size());
    for (int trial = 0; trial < pairs; ++trial) {
        const int i = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
        int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
        if (j == i) j = (j + 1) % n;
        const std::vector<double>& z1 = cloud.rows[static_cast<std::size_t>(i)];
        const std::vector<double>& z2 = cloud.rows[static_cast<std::size_t>(j)];
        std::vector<double> mid(z1.size());
        for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (z1[k] + z2[k]);
        const double dist =
            best.certified
                ? monotone_distance(mid).distance_sq
                : image_distance_sq(arch, mu, mid, restarts,
                                    seed ^ (0x7a1eULL + static_cast<std::uint64_t>(trial)), threads);
        if (dist > best.midpoint_distance_sq) {
            best.midpoint_distance_sq = dist;
            best.z1 = z1;
            best.z2 = z2;
            best.midpoint = mid;
        }
    }
    return best;
}

} // namespace landscape

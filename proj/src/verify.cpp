#include "landscape/verify.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "landscape/optim.hpp"

namespace landscape {

namespace {

double vec_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

// p-loss as an Objective over flattened parameters
Objective loss_objective(const Architecture& arch, const FiniteMeasure& mu, const Target& target,
                         const LossSpec& spec) {
    return [&arch, &mu, &target, spec](const std::vector<double>& flat,
                                       std::vector<double>& grad) -> double {
        const Parameters p = unflatten(arch, flat);
        const std::vector<double> preds = forward_all(arch, p, mu);
        grad = param_gradient(arch, p, mu, target, spec);
        return loss_value(spec, mu, preds, target);
    };
}

std::vector<double> random_init(const Architecture& arch, Rng& rng, double wlim, double blim) {
    Parameters p = Parameters::zeros(arch);
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        for (double& v : p.weights[i].data) v = rng.uniform(-wlim, wlim);
        for (double& v : p.biases[i]) v = rng.uniform(-blim, blim);
    }
    return flatten(arch, p);
}

} // namespace

LocalMinReport check_local_min(const SpuriousConstruction& construction, const FiniteMeasure& mu,
                               const Target& target, const LossSpec& spec, int samples,
                               std::uint64_t seed, int threads) {
    spec.validate();
    if (static_cast<int>(target.values.size()) != mu.size())
        throw ShapeError("check_local_min: target not aligned with measure");

    const TargetClassification cls = classify_target(mu, target);
    if (construction.variant.kind == VariantKind::Nonconstant && cls.affine_fit)
        throw TargetDegenerateError(
            "target is exactly affine on the support; the construction is a global minimum");
    if (construction.variant.kind == VariantKind::Constant && cls.constant_fit)
        throw TargetDegenerateError(
            "target is exactly constant on the support; the construction is a global minimum");

    const Architecture& arch = construction.arch;
    LocalMinReport report;
    report.samples = samples;
    report.radius_vacuous = construction.radius_vacuous;
    report.radius = construction.certified_radius > 0.0 ? construction.certified_radius
                                                        : 0.5 * construction.empirical_radius;

    std::vector<double> base_preds(static_cast<std::size_t>(mu.size()));
    for (int k = 0; k < mu.size(); ++k)
        base_preds[static_cast<std::size_t>(k)] =
            construction.realization(mu.points[static_cast<std::size_t>(k)]);
    report.base_loss = loss_value(spec, mu, base_preds, target);
    report.gradient_norm =
        vec_norm(param_gradient(arch, construction.params, mu, target, spec));

    const std::vector<double> flat = flatten(arch, construction.params);
    std::vector<double> gaps(static_cast<std::size_t>(samples), 0.0);
    std::vector<int> violations(static_cast<std::size_t>(samples), 0);
    const Rng master(seed);
    parallel_for(samples, threads, [&](int s) {
        Rng rng = master.derive(static_cast<std::uint64_t>(s));
        const std::vector<double> noise = rng.ball(static_cast<int>(flat.size()), report.radius);
        std::vector<double> moved = flat;
        for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += noise[i];
        const Parameters p = unflatten(arch, moved);
        if (!regime_check(construction, p, mu).in_regime) violations[static_cast<std::size_t>(s)] = 1;
        const std::vector<double> preds = forward_all(arch, p, mu);
        gaps[static_cast<std::size_t>(s)] =
            loss_value(spec, mu, preds, target) - report.base_loss;
    });
    report.min_gap = gaps.empty() ? 0.0 : gaps.front();
    double total = 0.0;
    for (double g : gaps) {
        report.min_gap = std::min(report.min_gap, g);
        total += g;
    }
    report.mean_gap = samples > 0 ? total / samples : 0.0;
    for (int v : violations) report.regime_violations += v;
    report.passed = report.gradient_norm <= 1e-8 && report.regime_violations == 0 &&
                    report.min_gap >= -1e-12;
    return report;
}

std::pair<Architecture, Parameters> compose_parallel(const SpuriousConstruction& chain,
                                                     const Architecture& residual_arch,
                                                     const Parameters& residual, double s) {
    const Architecture& carch = chain.arch;
    carch.validate();
    residual_arch.validate();
    residual.check_shapes(residual_arch);
    if (residual_arch.input_dim != carch.input_dim)
        throw ShapeError("compose_parallel: input dimensions differ");
    if (residual_arch.depth() != carch.depth())
        throw ShapeError("compose_parallel: depths differ");
    for (int i = 0; i < carch.depth(); ++i) {
        if (carch.widths[static_cast<std::size_t>(i)] != 1)
            throw ShapeError("compose_parallel: chain must have width-1 hidden layers");
        if (carch.activations[static_cast<std::size_t>(i)].tag() !=
            residual_arch.activations[static_cast<std::size_t>(i)].tag())
            throw ShapeError("compose_parallel: activation mismatch between chain and residual");
    }

    Architecture arch;
    arch.input_dim = carch.input_dim;
    arch.activations = carch.activations;
    for (int i = 0; i < carch.depth(); ++i)
        arch.widths.push_back(1 + residual_arch.widths[static_cast<std::size_t>(i)]);

    Parameters out = Parameters::zeros(arch);
    const int L = arch.depth();
    for (int i = 1; i <= L; ++i) {
        const Matrix& ca = chain.params.weights[static_cast<std::size_t>(i - 1)];
        const Matrix& ra = residual.weights[static_cast<std::size_t>(i - 1)];
        Matrix& a = out.weights[static_cast<std::size_t>(i - 1)];
        if (i == 1) {
            for (int c = 0; c < a.cols; ++c) a(0, c) = ca(0, c);
            for (int r = 0; r < ra.rows; ++r)
                for (int c = 0; c < a.cols; ++c) a(r + 1, c) = ra(r, c);
        } else {
            a(0, 0) = ca(0, 0);
            for (int r = 0; r < ra.rows; ++r)
                for (int c = 0; c < ra.cols; ++c) a(r + 1, c + 1) = ra(r, c);
        }
        out.biases[static_cast<std::size_t>(i - 1)][0] =
            chain.params.biases[static_cast<std::size_t>(i - 1)][0];
        for (int r = 0; r < ra.rows; ++r)
            out.biases[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(r + 1)] =
                residual.biases[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(r)];
    }
    Matrix& aout = out.weights.back();
    aout(0, 0) = chain.params.weights.back()(0, 0);
    const Matrix& rout = residual.weights.back();
    for (int c = 0; c < rout.cols; ++c) aout(0, c + 1) = s * rout(0, c);
    out.biases.back()[0] =
        chain.params.biases.back()[0] + s * residual.biases.back()[0];
    return {arch, out};
}

EscapeCertificate find_escape(const SpuriousConstruction& construction, const FiniteMeasure& mu,
                              const Target& target, const LossSpec& spec, int restarts,
                              std::uint64_t seed, int threads) {
    spec.validate();
    const Architecture& arch = construction.arch;
    std::vector<double> base_preds(static_cast<std::size_t>(mu.size()));
    for (int k = 0; k < mu.size(); ++k)
        base_preds[static_cast<std::size_t>(k)] =
            construction.realization(mu.points[static_cast<std::size_t>(k)]);
    const double spurious_loss = loss_value(spec, mu, base_preds, target);
    const std::vector<double> g = loss_gradient_predictions(spec, mu, base_preds, target);

    EscapeCertificate best;
    best.spurious_loss = spurious_loss;
    best.escape_loss = spurious_loss;
    bool have_candidate = false;

    const DescentOptions polish_opts{4000, 1e-13, 1e-2};

    // Phase A: directional split. For the nonconstant variant, a width-1
    // chain keeps the realization while a residual net is trained to align
    // with the negative loss gradient; for the constant variant the whole
    // net is scaled on top of the constant realization.
    const bool splittable =
        construction.variant.kind == VariantKind::Constant ||
        std::all_of(arch.widths.begin(), arch.widths.end(), [](int w) { return w >= 2; });
    if (splittable) {
        Architecture free_arch; // the network trained against the gradient
        if (construction.variant.kind == VariantKind::Nonconstant) {
            free_arch.input_dim = arch.input_dim;
            free_arch.activations = arch.activations;
            for (int w : arch.widths) free_arch.widths.push_back(w - 1);
        } else {
            free_arch = arch;
        }

        // minimize sum_k g_k psi(alpha, x_k)
        const Objective directional = [&free_arch, &mu, &g](const std::vector<double>& flat,
                                                            std::vector<double>& grad) -> double {
            const Parameters p = unflatten(free_arch, flat);
            const std::vector<double> preds = forward_all(free_arch, p, mu);
            grad = weighted_output_gradient(free_arch, p, mu, g);
            double acc = 0.0;
            for (int k = 0; k < mu.size(); ++k)
                acc += g[static_cast<std::size_t>(k)] * preds[static_cast<std::size_t>(k)];
            return acc;
        };
        const int dir_restarts = std::max(8, restarts / 4);
        const MultistartResult dir = multistart_descent(
            dir_restarts, threads, seed ^ 0xd1ec7ULL,
            [&free_arch](int, Rng& rng) { return random_init(free_arch, rng, 1.0, 1.0); },
            directional, DescentOptions{400, 1e-12, 1e-2});

        if (dir.best_restart >= 0 && dir.best.f < -1e-10) {
            const Parameters residual = unflatten(free_arch, dir.best.x);
            const std::vector<double> h = forward_all(free_arch, residual, mu);
            // line search on s >= 0 for loss(base + s * h)
            auto phi = [&](double s) {
                std::vector<double> preds(base_preds);
                for (std::size_t k = 0; k < preds.size(); ++k) preds[k] += s * h[k];
                return loss_value(spec, mu, preds, target);
            };
            double s_prev = 0.0, s_cur = 1e-3;
            double f_cur = phi(s_cur);
            for (int it = 0; it < 200; ++it) {
                const double f_next = phi(s_cur * 2.0);
                if (f_next >= f_cur) break;
                s_prev = s_cur;
                s_cur *= 2.0;
                f_cur = f_next;
            }
            double s_star = golden_section_min(phi, s_prev, s_cur * 2.0, 1e-12);
            if (phi(s_star) < spurious_loss) {
                Parameters split_params;
                Architecture split_arch;
                if (construction.variant.kind == VariantKind::Nonconstant) {
                    // rebuild the same realization as a width-1 chain
                    Architecture chain_arch;
                    chain_arch.input_dim = arch.input_dim;
                    chain_arch.activations = arch.activations;
                    chain_arch.widths.assign(arch.widths.size(), 1);
                    const SpuriousConstruction chain =
                        construct_nonconstant(chain_arch, construction.segments,
                                              construction.realization.slope,
                                              construction.realization.intercept, mu);
                    auto composed = compose_parallel(chain, free_arch, residual, s_star);
                    split_arch = composed.first;
                    split_params = composed.second;
                } else {
                    split_arch = arch;
                    split_params = residual;
                    Matrix& aout = split_params.weights.back();
                    for (double& v : aout.data) v *= s_star;
                    split_params.biases.back()[0] =
                        s_star * split_params.biases.back()[0] +
                        construction.realization.intercept;
                }
                // polish with full-parameter descent
                const DescentResult polished =
                    gradient_descent(loss_objective(split_arch, mu, target, spec),
                                     flatten(split_arch, split_params), polish_opts);
                const double candidate = std::min(polished.f, phi(s_star));
                if (candidate < best.escape_loss) {
                    best.escape_loss = candidate;
                    best.params = polished.f <= phi(s_star) ? unflatten(split_arch, polished.x)
                                                            : split_params;
                    best.method = "parallel_split";
                    have_candidate = true;
                }
            }
        }
    }

    // Phase B: random multistart descent on the original architecture.
    const MultistartResult ms = multistart_descent(
        restarts, threads, seed,
        [&arch](int, Rng& rng) { return random_init(arch, rng, 1.0, 1.0); },
        loss_objective(arch, mu, target, spec), polish_opts);
    if (ms.best_restart >= 0 && ms.best.f < best.escape_loss) {
        best.escape_loss = ms.best.f;
        best.params = unflatten(arch, ms.best.x);
        best.method = "random_restart";
        best.restarts_used = ms.best_restart + 1;
        have_candidate = true;
    }

    if (!have_candidate || !(best.escape_loss < spurious_loss))
        throw SearchError("find_escape: no strict improvement found");
    // independent re-check from the stored parameters
    {
        Architecture earch = arch;
        const std::vector<double> preds = forward_all(earch, best.params, mu);
        const double recomputed = loss_value(spec, mu, preds, target);
        if (!(recomputed < spurious_loss))
            throw SearchError("find_escape: candidate failed re-verification");
        best.escape_loss = recomputed;
    }
    best.gap = spurious_loss - best.escape_loss;
    return best;
}

double image_distance_sq(const Architecture& arch, const FiniteMeasure& mu,
                         const std::vector<double>& y, int restarts, std::uint64_t seed,
                         int threads, std::vector<double>* best_predictions) {
    if (static_cast<int>(y.size()) != mu.size())
        throw ShapeError("image_distance_sq: target length mismatch");
    FiniteMeasure unit = mu;
    std::fill(unit.weights.begin(), unit.weights.end(), 1.0);
    const Target ty{y};
    const LossSpec l2{2.0};
    const MultistartResult ms = multistart_descent(
        restarts, threads, seed,
        [&arch](int, Rng& rng) { return random_init(arch, rng, 10.0, 5.0); },
        loss_objective(arch, unit, ty, l2), DescentOptions{800, 1e-13, 1e-2});
    if (best_predictions && ms.best_restart >= 0)
        *best_predictions = forward_all(arch, unflatten(arch, ms.best.x), unit);
    return ms.best.f;
}

ExpressivenessReport expressiveness_gap(const Architecture& arch, const FiniteMeasure& mu,
                                        int n_directions, int restarts, std::uint64_t seed,
                                        int threads) {
    ExpressivenessReport report;
    Rng master(seed);
    for (int i = 0; i < n_directions; ++i) {
        Rng rng = master.derive(static_cast<std::uint64_t>(i) + 1);
        DirectionGap gap;
        gap.direction = rng.sphere(mu.size());
        gap.distance_sq = image_distance_sq(arch, mu, gap.direction, restarts,
                                            master.derive(0xabc000ULL + static_cast<std::uint64_t>(i)).next(),
                                            threads);
        report.max_distance_sq = std::max(report.max_distance_sq, gap.distance_sq);
        report.directions.push_back(std::move(gap));
    }
    return report;
}

} // namespace landscape

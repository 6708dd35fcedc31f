#include "landscape/spurious.hpp"

#include <algorithm>
#include <cmath>

#include "landscape/rng.hpp"

namespace landscape {

namespace {

double vec_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double max_abs_inner(const std::vector<double>& slope, const FiniteMeasure& mu) {
    double best = 0.0;
    for (const auto& x : mu.points) {
        double acc = 0.0;
        for (std::size_t i = 0; i < slope.size(); ++i) acc += slope[i] * x[i];
        best = std::max(best, std::abs(acc));
    }
    return best;
}

// Internal consistency check after constructing: must sit in the regime and
// realize the requested map.
void check_construction(SpuriousConstruction& c, const FiniteMeasure& mu,
                        const std::vector<double>& slope, double intercept) {
    const AffineRealization real = regime_check(c, c.params, mu);
    if (!real.in_regime)
        throw SearchError("construction escaped its own regime; segments are inconsistent");
    double err = std::abs(real.map.intercept - intercept);
    for (std::size_t i = 0; i < slope.size(); ++i)
        err = std::max(err, std::abs(real.map.slope[i] - slope[i]));
    if (err > 1e-8)
        throw SearchError("construction does not realize the requested affine map");
    c.realization = real.map;
    const RadiusCertificate cert = certify_radius(c.arch, c.params, c.segments, c.variant, mu);
    c.certified_radius = cert.certified;
    c.radius_vacuous = cert.vacuous;

    // Empirical containment radius by rejection sampling, doubling until a
    // violation shows up.
    Rng rng(0x5eedf00dULL);
    double rho = std::max(cert.certified, 1e-6);
    double last_good = 0.0;
    const std::vector<double> flat = flatten(c.arch, c.params);
    for (int level = 0; level < 60; ++level) {
        bool ok = true;
        for (int s = 0; s < 200 && ok; ++s) {
            Rng sub = rng.derive(static_cast<std::uint64_t>(level) * 1000 + static_cast<std::uint64_t>(s));
            std::vector<double> noise = sub.ball(static_cast<int>(flat.size()), rho);
            std::vector<double> moved = flat;
            for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += noise[i];
            ok = regime_check(c, unflatten(c.arch, moved), mu).in_regime;
        }
        if (!ok) break;
        last_good = rho;
        rho *= 2.0;
    }
    c.empirical_radius = last_good;
}

} // namespace

SpuriousConstruction construct_nonconstant(const Architecture& arch,
                                           const std::vector<AffineSegment>& segments,
                                           const std::vector<double>& slope, double intercept,
                                           const FiniteMeasure& mu) {
    arch.validate();
    if (mu.size() < 1) throw EmptyDomainError("construct_nonconstant: empty support");
    if (mu.dim() != arch.input_dim)
        throw ShapeError("construct_nonconstant: measure dimension mismatch");
    if (static_cast<int>(slope.size()) != arch.input_dim)
        throw ShapeError("construct_nonconstant: slope dimension mismatch");
    if (static_cast<int>(segments.size()) != arch.depth())
        throw ShapeError("construct_nonconstant: one segment per hidden layer required");
    for (const AffineSegment& seg : segments) {
        if (!(seg.radius > 0.0)) throw PreconditionError("segment radius must be positive");
        if (seg.is_constant())
            throw ConstantSegmentError(
                "construct_nonconstant needs segments with nonzero slope");
    }

    const int L = arch.depth();
    SpuriousConstruction c;
    c.arch = arch;
    c.segments = segments;
    c.variant = SpuriousVariant{VariantKind::Nonconstant, 0};
    c.params = Parameters::zeros(arch);
    c.input_bound = max_abs_inner(slope, mu);
    const double denom = 2.0 * c.input_bound + 1.0;

    // layer 1: row 0 carries the signal, the rest sit at the window center
    {
        Matrix& a1 = c.params.weights[0];
        const double scale = segments[0].radius / denom;
        for (int j = 0; j < arch.input_dim; ++j) a1(0, j) = scale * slope[static_cast<std::size_t>(j)];
        std::fill(c.params.biases[0].begin(), c.params.biases[0].end(), segments[0].center);
        c.first_row.assign(a1.data.begin(), a1.data.begin() + arch.input_dim);
    }
    // layers 2..L: renormalize the previous window onto the next one
    for (int i = 2; i <= L; ++i) {
        const AffineSegment& prev = segments[static_cast<std::size_t>(i - 2)];
        const AffineSegment& cur = segments[static_cast<std::size_t>(i - 1)];
        const double scale = cur.radius / (prev.slope * prev.radius);
        Matrix& ai = c.params.weights[static_cast<std::size_t>(i - 1)];
        ai(0, 0) = scale;
        std::vector<double>& bi = c.params.biases[static_cast<std::size_t>(i - 1)];
        std::fill(bi.begin(), bi.end(), cur.center);
        bi[0] -= (prev.center * prev.slope + prev.offset) * scale;
    }
    // output layer: undo the window scaling and shift to the intercept
    {
        const AffineSegment& last = segments[static_cast<std::size_t>(L - 1)];
        const double scale = denom / (last.slope * last.radius);
        c.params.weights[static_cast<std::size_t>(L)](0, 0) = scale;
        c.params.biases[static_cast<std::size_t>(L)][0] =
            intercept - (last.center * last.slope + last.offset) * scale;
    }

    check_construction(c, mu, slope, intercept);
    return c;
}

SpuriousConstruction construct_constant(const Architecture& arch, int constant_layer,
                                        const AffineSegment& segment, double value,
                                        const FiniteMeasure& mu) {
    arch.validate();
    if (mu.size() < 1) throw EmptyDomainError("construct_constant: empty support");
    if (mu.dim() != arch.input_dim)
        throw ShapeError("construct_constant: measure dimension mismatch");
    if (constant_layer < 1 || constant_layer > arch.depth())
        throw PreconditionError("construct_constant: layer out of range");
    if (!segment.is_constant())
        throw PreconditionError("construct_constant needs a constant segment");
    if (!(segment.radius > 0.0)) throw PreconditionError("segment radius must be positive");

    SpuriousConstruction c;
    c.arch = arch;
    c.variant = SpuriousVariant{VariantKind::Constant, constant_layer};
    c.params = Parameters::zeros(arch);
    // Unused layers keep radius-0 sentinels so any misuse trips the regime check.
    c.segments.assign(static_cast<std::size_t>(arch.depth()), AffineSegment{});
    c.segments[static_cast<std::size_t>(constant_layer - 1)] = segment;
    std::fill(c.params.biases[static_cast<std::size_t>(constant_layer - 1)].begin(),
              c.params.biases[static_cast<std::size_t>(constant_layer - 1)].end(), segment.center);
    c.params.biases.back()[0] = value;
    c.first_row.assign(static_cast<std::size_t>(arch.input_dim), 0.0);

    check_construction(c, mu, std::vector<double>(static_cast<std::size_t>(arch.input_dim), 0.0),
                       value);
    return c;
}

AffineRealization regime_check(const SpuriousConstruction& construction, const Parameters& params,
                               const FiniteMeasure& mu) {
    if (construction.variant.kind == VariantKind::Nonconstant)
        return affine_realization(construction.arch, params, construction.segments, mu);

    // Constant variant: only the constant layer must stay inside its window;
    // everything after it is input-independent.
    const int j = construction.variant.constant_layer;
    const AffineSegment& seg = construction.segments[static_cast<std::size_t>(j - 1)];
    AffineRealization result;
    for (int k = 0; k < mu.size(); ++k) {
        const ForwardTrace trace =
            forward_trace(construction.arch, params, mu.points[static_cast<std::size_t>(k)]);
        const double guard = seg.radius * (1.0 - 1e-12);
        for (double h : trace.pre[static_cast<std::size_t>(j - 1)]) {
            const double dist = std::abs(h - seg.center);
            if (!(dist < guard)) {
                result.in_regime = false;
                result.violation = RegimeViolation{j, k, seg.radius - dist};
                return result;
            }
        }
    }
    result.in_regime = true;
    result.map.slope.assign(static_cast<std::size_t>(construction.arch.input_dim), 0.0);
    result.map.intercept = forward(construction.arch, params, mu.points.front());
    return result;
}

RadiusCertificate certify_radius(const Architecture& arch, const Parameters& params,
                                 const std::vector<AffineSegment>& segments,
                                 const SpuriousVariant& variant, const FiniteMeasure& mu) {
    const int L = arch.depth();

    // Margins and norms at the base point.
    std::vector<double> margin(static_cast<std::size_t>(L), 0.0);
    {
        std::vector<double> worst(static_cast<std::size_t>(L), 0.0);
        for (int k = 0; k < mu.size(); ++k) {
            const ForwardTrace trace = forward_trace(arch, params, mu.points[static_cast<std::size_t>(k)]);
            for (int i = 1; i <= L; ++i)
                for (double h : trace.pre[static_cast<std::size_t>(i - 1)])
                    worst[static_cast<std::size_t>(i - 1)] =
                        std::max(worst[static_cast<std::size_t>(i - 1)],
                                 std::abs(h - segments[static_cast<std::size_t>(i - 1)].center));
        }
        for (int i = 0; i < L; ++i)
            margin[static_cast<std::size_t>(i)] = segments[static_cast<std::size_t>(i)].radius -
                                                  worst[static_cast<std::size_t>(i)];
    }

    std::vector<double> weight_norm(static_cast<std::size_t>(L + 1), 0.0);
    std::vector<double> bias_norm(static_cast<std::size_t>(L + 1), 0.0);
    for (int i = 0; i <= L; ++i) {
        weight_norm[static_cast<std::size_t>(i)] =
            std::sqrt(params.weights[static_cast<std::size_t>(i)].frobenius_sq());
        bias_norm[static_cast<std::size_t>(i)] = vec_norm(params.biases[static_cast<std::size_t>(i)]);
    }
    const double z0 = mu.support_radius();

    // Does a perturbation of flattened norm r keep every constrained layer
    // strictly inside its window? All bounds are 2-norm based and, inside a
    // window, activations act affinely with slope beta.
    auto contained = [&](double r) -> bool {
        if (variant.kind == VariantKind::Nonconstant) {
            double z_base = z0;  // norm bound on the previous layer's output at the base point
            double z_drift = 0.0; // norm bound on its perturbation
            for (int i = 1; i <= L; ++i) {
                const AffineSegment& seg = segments[static_cast<std::size_t>(i - 1)];
                const double drift = r * (z_base + z_drift) +
                                     weight_norm[static_cast<std::size_t>(i - 1)] * z_drift + r;
                if (!(drift < margin[static_cast<std::size_t>(i - 1)] * (1.0 - 1e-9))) return false;
                const double w = std::sqrt(static_cast<double>(arch.layer_width(i)));
                const double peak = std::abs(seg.slope) * seg.radius +
                                    std::abs(seg.slope * seg.center + seg.offset);
                z_base = w * peak;
                z_drift = std::abs(seg.slope) * drift * w;
            }
            return true;
        }
        // Constant variant: propagate a raw bound up to the constant layer,
        // whose pre-activation must stay within the window of its center.
        const int j = variant.constant_layer;
        double z_bound = z0;
        for (int i = 1; i < j; ++i) {
            const double h_bound = (weight_norm[static_cast<std::size_t>(i - 1)] + r) * z_bound +
                                   bias_norm[static_cast<std::size_t>(i - 1)] + r;
            const Activation& act = arch.activations[static_cast<std::size_t>(i - 1)];
            z_bound = std::sqrt(static_cast<double>(arch.layer_width(i))) * act.abs_bound(h_bound);
        }
        const AffineSegment& seg = segments[static_cast<std::size_t>(j - 1)];
        double bias_off = 0.0;
        for (double b : params.biases[static_cast<std::size_t>(j - 1)])
            bias_off = std::max(bias_off, std::abs(b - seg.center));
        const double dev = (weight_norm[static_cast<std::size_t>(j - 1)] + r) * z_bound +
                           bias_off + r;
        return dev < seg.radius * (1.0 - 1e-9);
    };

    RadiusCertificate cert;
    if (!contained(1e-300)) {
        cert.vacuous = true;
        return cert;
    }
    double lo = 1e-300, hi = 1e-300;
    while (hi < 1e6 && contained(hi * 2.0)) hi *= 2.0;
    if (hi <= 1e-300) {
        cert.vacuous = true;
        return cert;
    }
    lo = hi; // last known-contained radius; probe the gap to 2*hi
    double bad = hi * 2.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + bad);
        if (contained(mid)) lo = mid;
        else bad = mid;
    }
    cert.certified = lo;
    cert.vacuous = !(lo > 1e-250);
    return cert;
}

RegimeDecomposition decompose_regime(const Architecture& arch,
                                     const std::vector<AffineSegment>& segments,
                                     const Parameters& params) {
    params.check_shapes(arch);
    if (static_cast<int>(segments.size()) != arch.depth())
        throw ShapeError("decompose_regime: one segment per hidden layer required");
    const int L = arch.depth();
    double slope_product = 1.0;
    for (const AffineSegment& seg : segments) slope_product *= seg.slope;

    // row vector A_{L+1} A_L ... A_2
    std::vector<double> v(params.weights.back().data);
    for (int i = L; i >= 2; --i) {
        const Matrix& a = params.weights[static_cast<std::size_t>(i - 1)];
        std::vector<double> next(static_cast<std::size_t>(a.cols), 0.0);
        for (int r = 0; r < a.rows; ++r)
            for (int col = 0; col < a.cols; ++col)
                next[static_cast<std::size_t>(col)] += v[static_cast<std::size_t>(r)] * a(r, col);
        v = std::move(next);
    }

    RegimeDecomposition out;
    out.gain = slope_product * v[0];
    // bypass through rows 1.. of A_1
    out.bypass.assign(static_cast<std::size_t>(arch.input_dim), 0.0);
    const Matrix& a1 = params.weights.front();
    for (int r = 1; r < a1.rows; ++r)
        for (int col = 0; col < a1.cols; ++col)
            out.bypass[static_cast<std::size_t>(col)] +=
                slope_product * v[static_cast<std::size_t>(r)] * a1(r, col);
    // offset: fold the per-layer affine maps at x = 0, output bias excluded
    std::vector<double> t(params.biases.front());
    {
        const AffineSegment& seg = segments.front();
        for (double& x : t) x = seg.slope * x + seg.offset;
    }
    for (int i = 2; i <= L; ++i) {
        const AffineSegment& seg = segments[static_cast<std::size_t>(i - 1)];
        const Matrix& a = params.weights[static_cast<std::size_t>(i - 1)];
        const std::vector<double>& b = params.biases[static_cast<std::size_t>(i - 1)];
        std::vector<double> tn = a.apply(t);
        for (int r = 0; r < a.rows; ++r)
            tn[static_cast<std::size_t>(r)] =
                seg.slope * (tn[static_cast<std::size_t>(r)] + b[static_cast<std::size_t>(r)]) +
                seg.offset;
        t = std::move(tn);
    }
    const Matrix& out_w = params.weights.back();
    out.offset = 0.0;
    for (int jcol = 0; jcol < out_w.cols; ++jcol)
        out.offset += out_w(0, jcol) * t[static_cast<std::size_t>(jcol)];
    return out;
}

std::vector<int> family_free_indices(const Architecture& arch, const SpuriousVariant& variant) {
    const int m = arch.param_count();
    std::vector<bool> pinned(static_cast<std::size_t>(m), false);
    pinned[static_cast<std::size_t>(m - 1)] = true; // output bias
    if (variant.kind == VariantKind::Nonconstant)
        for (int i = 0; i < arch.input_dim; ++i) pinned[static_cast<std::size_t>(i)] = true;
    std::vector<int> free;
    for (int i = 0; i < m; ++i)
        if (!pinned[static_cast<std::size_t>(i)]) free.push_back(i);
    return free;
}

FamilySamples sample_family(const SpuriousConstruction& construction, const FiniteMeasure& mu,
                            int count, double delta, std::uint64_t seed) {
    if (count < 1) throw PreconditionError("sample_family: count must be >= 1");
    if (!(delta >= 0.0)) throw PreconditionError("sample_family: delta must be >= 0");
    const Architecture& arch = construction.arch;
    const std::vector<double> flat_base = flatten(arch, construction.params);
    const std::vector<int> free = family_free_indices(arch, construction.variant);
    const int d = arch.input_dim;

    const bool nonconstant = construction.variant.kind == VariantKind::Nonconstant;
    RegimeDecomposition base_decomp;
    if (nonconstant) {
        base_decomp = decompose_regime(arch, construction.segments, construction.params);
        if (base_decomp.gain == 0.0)
            throw PreconditionError("sample_family: base point has zero gain");
    }

    Rng master(seed);
    FamilySamples out;
    double cur = delta;
    for (int attempt = 0; attempt <= 40; ++attempt, cur *= 0.5) {
        out.members.clear();
        bool ok = true;
        for (int s = 0; s < count && ok; ++s) {
            Rng rng = master.derive(static_cast<std::uint64_t>(attempt) * 1000003ULL +
                                    static_cast<std::uint64_t>(s));
            const std::vector<double> noise = rng.ball(static_cast<int>(free.size()), cur);
            std::vector<double> flat = flat_base;
            for (std::size_t i = 0; i < free.size(); ++i)
                flat[static_cast<std::size_t>(free[i])] += noise[i];
            Parameters p = unflatten(arch, flat);

            if (nonconstant) {
                const RegimeDecomposition dec = decompose_regime(arch, construction.segments, p);
                if (std::abs(dec.gain) < 1e-12 * std::max(1.0, std::abs(base_decomp.gain))) {
                    ok = false;
                    break;
                }
                // restore row 0 of A_1 and the output bias so the realization
                // is unchanged
                for (int i = 0; i < d; ++i)
                    p.weights[0](0, i) = (base_decomp.gain / dec.gain) *
                                             construction.first_row[static_cast<std::size_t>(i)] -
                                         dec.bypass[static_cast<std::size_t>(i)] / dec.gain;
                p.biases.back()[0] = construction.realization.intercept - dec.offset;
            } else {
                const double partial = forward(arch, p, mu.points.front()) - p.biases.back()[0];
                p.biases.back()[0] = construction.realization.intercept - partial;
            }

            const AffineRealization real = regime_check(construction, p, mu);
            if (!real.in_regime) {
                ok = false;
                break;
            }
            double err = std::abs(real.map.intercept - construction.realization.intercept);
            for (int i = 0; i < d; ++i)
                err = std::max(err, std::abs(real.map.slope[static_cast<std::size_t>(i)] -
                                             construction.realization.slope[static_cast<std::size_t>(i)]));
            if (err > 1e-9) {
                ok = false;
                break;
            }
            out.members.push_back(std::move(p));
        }
        if (ok) {
            out.delta_used = cur;
            out.halvings = attempt;
            return out;
        }
    }
    throw ScaleTooLargeError("sample_family: no delta small enough after 40 halvings");
}

SpuriousConstruction family_member(const SpuriousConstruction& base, const Parameters& params,
                                   const FiniteMeasure& mu) {
    SpuriousConstruction c = base;
    c.params = params;
    c.first_row.assign(params.weights.front().data.begin(),
                       params.weights.front().data.begin() + base.arch.input_dim);
    const AffineRealization real = regime_check(base, params, mu);
    if (!real.in_regime) throw PreconditionError("family_member: parameters leave the regime");
    c.realization = real.map;
    const RadiusCertificate cert = certify_radius(c.arch, c.params, c.segments, c.variant, mu);
    c.certified_radius = cert.certified;
    c.radius_vacuous = cert.vacuous;
    c.empirical_radius = std::max(c.empirical_radius, cert.certified);
    return c;
}

} // namespace landscape

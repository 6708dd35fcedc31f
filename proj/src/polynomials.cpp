#include "landscape/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace landscape {

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : 0;
    den = g ? d / g : 1;
    if (num == 0) den = 1;
}

std::int64_t Rational::height() const {
    return std::max(num < 0 ? -num : num, den);
}

double Polynomial::eval(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + it->value();
    return acc;
}

double Polynomial::derivative_eval(double x) const {
    double acc = 0.0;
    for (int i = degree(); i >= 1; --i)
        acc = acc * x + coeffs[static_cast<std::size_t>(i)].value() * i;
    return acc;
}

double Polynomial::sup_norm_unit() const {
    const int grid = 1000;
    double best = 0.0;
    int best_i = 0;
    for (int i = 0; i <= grid; ++i) {
        const double v = std::abs(eval(static_cast<double>(i) / grid));
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // Golden-section refinement of |p| around the best grid point.
    double lo = std::max(0.0, (best_i - 1.0) / grid);
    double hi = std::min(1.0, (best_i + 1.0) / grid);
    const double gr = 0.6180339887498948482;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = std::abs(eval(x1)), f2 = std::abs(eval(x2));
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = std::abs(eval(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = std::abs(eval(x1));
        }
    }
    return std::max(best, std::max(f1, f2));
}

std::string Polynomial::to_string() const {
    std::string out;
    for (int i = degree(); i >= 0; --i) {
        const Rational& c = coeffs[static_cast<std::size_t>(i)];
        if (c.is_zero()) continue;
        if (!out.empty()) out += c.num < 0 ? " - " : " + ";
        else if (c.num < 0) out += "-";
        const std::int64_t an = c.num < 0 ? -c.num : c.num;
        const bool unit = an == 1 && c.den == 1;
        if (!unit || i == 0) {
            out += std::to_string(an);
            if (c.den != 1) out += "/" + std::to_string(c.den);
        }
        if (i >= 1) out += "x";
        if (i >= 2) out += "^" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
}

namespace {

// Coefficient pool for one round: reduced rationals of height <= n, sorted by
// |q| ascending with positive before negative. Index 0 is always 0.
std::vector<Rational> coefficient_pool(int n) {
    std::vector<Rational> pool;
    pool.emplace_back(0, 1);
    for (std::int64_t den = 1; den <= n; ++den)
        for (std::int64_t num = -n; num <= n; ++num) {
            if (num == 0) continue;
            if (std::gcd(num < 0 ? -num : num, den) != 1) continue;
            pool.emplace_back(num, den);
        }
    std::sort(pool.begin() + 1, pool.end(), [](const Rational& a, const Rational& b) {
        const double fa = std::abs(a.value()), fb = std::abs(b.value());
        if (fa != fb) return fa < fb;
        return a.value() > b.value(); // positive before negative
    });
    return pool;
}

bool is_unit_monomial_x(const Polynomial& p) {
    return p.degree() == 1 && p.coeffs[0].is_zero() && p.coeffs[1] == Rational(1, 1);
}

} // namespace

const Polynomial& PolynomialEnumerator::at(std::size_t k) {
    if (k == 0) throw std::out_of_range("polynomial index is 1-based");
    extend_to(k);
    return entries_[k - 1];
}

double PolynomialEnumerator::sup_norm(std::size_t k) {
    at(k);
    return sup_norms_[k - 1];
}

void PolynomialEnumerator::extend_to(std::size_t k) {
    if (entries_.empty()) {
        Polynomial x{{Rational(0, 1), Rational(1, 1)}};
        entries_.push_back(x);
        sup_norms_.push_back(x.sup_norm_unit());
    }
    while (entries_.size() < k) emit_round(++rounds_done_);
}

void PolynomialEnumerator::emit_round(int n) {
    const std::vector<Rational> pool = coefficient_pool(n);
    const int pool_size = static_cast<int>(pool.size());
    // A tuple is new in round n unless all its coefficients already fit in the
    // previous pool and its degree fit the previous degree cap.
    const std::int64_t prev_height = n - 1;
    const int prev_degree_cap = 2 * (n - 1);

    struct Entry {
        std::vector<int> idx; // pool indices, leading coefficient first
        int nonzero;
    };

    for (int deg = 0; deg <= 2 * n; ++deg) {
        std::vector<Entry> block;
        std::vector<int> idx(static_cast<std::size_t>(deg) + 1, 0);
        idx[0] = 1; // leading coefficient nonzero
        while (true) {
            bool fresh = deg > prev_degree_cap;
            int nonzero = 0;
            for (int i = 0; i <= deg; ++i) {
                const Rational& c = pool[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
                if (!c.is_zero()) ++nonzero;
                if (c.height() > prev_height) fresh = true;
            }
            if (fresh) block.push_back({idx, nonzero});
            // odometer: last position fastest, leading coefficient skips 0
            int pos = deg;
            while (pos >= 0) {
                ++idx[static_cast<std::size_t>(pos)];
                if (idx[static_cast<std::size_t>(pos)] < pool_size) break;
                idx[static_cast<std::size_t>(pos)] = pos == 0 ? 1 : 0;
                --pos;
            }
            if (pos < 0) break;
        }
        std::sort(block.begin(), block.end(), [](const Entry& a, const Entry& b) {
            if (a.nonzero != b.nonzero) return a.nonzero < b.nonzero;
            return a.idx < b.idx;
        });
        for (const Entry& e : block) {
            Polynomial p;
            p.coeffs.resize(static_cast<std::size_t>(deg) + 1);
            for (int i = 0; i <= deg; ++i)
                p.coeffs[static_cast<std::size_t>(deg - i)] = pool[static_cast<std::size_t>(e.idx[static_cast<std::size_t>(i)])];
            if (is_unit_monomial_x(p)) continue; // pinned as p_1
            entries_.push_back(p);
            sup_norms_.push_back(p.sup_norm_unit());
        }
    }
}

} // namespace landscape

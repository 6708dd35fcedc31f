#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace landscape {

// Reduced rational with a small numerator/denominator. Only used for
// polynomial coefficients, where heights stay tiny.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::int64_t height() const;
    bool is_zero() const { return num == 0; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

// Coefficients in ascending power order; coeffs.back() != 0 except for the
// zero polynomial, which the enumeration never produces.
struct Polynomial {
    std::vector<Rational> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double eval(double x) const;
    double derivative_eval(double x) const;
    // Sup norm on [0,1]: 1001-point grid, then golden-section refinement
    // around the best bracket down to an interval of 1e-12.
    double sup_norm_unit() const;
    std::string to_string() const;
};

// Deterministic enumeration of all nonzero polynomials with rational
// coefficients, 1-based, p(1) = x. Order: rounds n = 1, 2, ... where round n
// holds the polynomials with coefficient heights <= n and degree <= 2n not
// seen earlier; within a round degree ascends, then sparser coefficient
// tuples first, then leading-first lexicographic with rationals ordered by
// |q| ascending and positive before negative.
class PolynomialEnumerator {
  public:
    const Polynomial& at(std::size_t k); // k >= 1
    double sup_norm(std::size_t k);      // cached alongside the polynomial

  private:
    void extend_to(std::size_t k);
    void emit_round(int n);

    std::vector<Polynomial> entries_;
    std::vector<double> sup_norms_;
    int rounds_done_ = 0;
};

} // namespace landscape

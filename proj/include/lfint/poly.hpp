#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lfint/monomial.hpp"
#include "lfint/rational.hpp"

namespace lfint {

struct NotDivisible : std::runtime_error {
    NotDivisible() : std::runtime_error("polynomial division is not exact") {}
};

// Sparse trivariate polynomial over Rational. Terms are kept in descending
// graded-lex order (x > y > z), so begin() is the leading term. No zero
// coefficients and no negative exponents are ever stored.
class Poly {
  public:
    using TermMap = std::map<Monomial, Rational, GlexGreater>;

    Poly() = default;
    Poly(const Rational& c) { set(kUnit, c); }
    Poly(int c) : Poly(Rational(c)) {}
    static Poly variable(Var v) { return term(var_monomial(v), 1); }
    static Poly term(const Monomial& m, const Rational& c);

    bool is_zero() const { return t_.empty(); }
    bool is_constant() const {
        return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_unit());
    }
    Rational constant_value() const;  // requires is_constant()
    size_t term_count() const { return t_.size(); }

    int32_t degree() const;           // total degree; -1 for the zero poly
    int32_t degree(Var v) const;      // degree in one variable; -1 for zero
    const Monomial& leading_monomial() const;  // requires !is_zero()
    const Rational& leading_coeff() const;     // requires !is_zero()
    Rational coeff(const Monomial& m) const;

    const TermMap& terms() const { return t_; }

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    Poly& mul_scalar(const Rational& c);
    friend Poly operator*(const Rational& c, Poly p) { return p.mul_scalar(c); }
    Poly pow(uint32_t e) const;
    friend bool operator==(const Poly&, const Poly&) = default;

    // d/dv, term by term.
    Poly derivative(Var v) const;

    Rational evaluate(const Rational& x, const Rational& y,
                      const Rational& z) const;

    // Largest rational c > 0 such that *this / c has coprime integer
    // coefficients; 0 for the zero polynomial.
    Rational content() const;
    // *this / content, with sign flipped so the leading coefficient is
    // positive. Zero stays zero.
    Poly primitive_part() const;
    bool has_integer_coeffs() const;

    // Add c * m * p; the workhorse of long division and linear recovery.
    void add_scaled(const Monomial& m, const Rational& c, const Poly& p);

    void set(const Monomial& m, const Rational& c);  // overwrite one term

  private:
    TermMap t_;
};

// Exact quotient a / b. Throws NotDivisible / DivisionByZero.
Poly exact_div(const Poly& a, const Poly& b);
// As above but nullopt instead of NotDivisible.
std::optional<Poly> try_exact_div(const Poly& a, const Poly& b);

// Gcd in Q[x,y,z]: primitive with positive leading coefficient (1 for
// coprime inputs and nonzero constants; gcd(p, 0) = normalized p).
Poly gcd_poly(const Poly& a, const Poly& b);

// View of a polynomial as univariate in `v` with Poly coefficients;
// index = exponent of v, entries may be zero polys only implicitly (sparse).
std::map<int32_t, Poly> collect_by_var(const Poly& p, Var v);
Poly assemble_by_var(const std::map<int32_t, Poly>& coeffs, Var v);

// Pseudo-remainder of a by b with respect to v: lc(b)^k * a = q*b + r with
// deg_v(r) < deg_v(b). Requires deg_v(b) >= 0.
Poly pseudo_rem(const Poly& a, const Poly& b, Var v);

}  // namespace lfint

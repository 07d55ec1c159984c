#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace lfint {

// Arbitrary-precision integers and rationals. mpq_class keeps the canonical
// form we rely on everywhere: fully reduced, denominator > 0, zero is 0/1.
using Int = mpz_class;
using Rational = mpq_class;

struct DivisionByZero : std::runtime_error {
    DivisionByZero() : std::runtime_error("division by zero") {}
};

inline Rational make_rational(const Int& num, const Int& den) {
    if (den == 0) throw DivisionByZero();
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

inline std::string to_string(const Int& n) { return n.get_str(); }

// "3", "-2", "3/2"
inline std::string to_string(const Rational& q) { return q.get_str(); }

// Nonnegative gcd of two rationals: the largest r with a/r, b/r integers.
// gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d) reduced; used for content extraction.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
    if (is_zero(a)) return abs(b);
    if (is_zero(b)) return abs(a);
    Int num, den;
    mpz_gcd(num.get_mpz_t(), a.get_num().get_mpz_t(), b.get_num().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), a.get_den().get_mpz_t(), b.get_den().get_mpz_t());
    return make_rational(num, den);
}

}  // namespace lfint

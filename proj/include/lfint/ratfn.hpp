#pragma once

#include "lfint/poly.hpp"

namespace lfint {

// Rational function num/den in canonical form:
//   - den is never the zero polynomial,
//   - gcd(num, den) = 1 (polynomial gcd),
//   - den is an integer-coefficient primitive polynomial with positive
//     leading coefficient (the scale lives in num),
//   - zero is 0/1.
// Canonical form is unique, so operator== on components is value equality.
class RatFn {
  public:
    RatFn() : num_(), den_(1) {}
    RatFn(const Poly& p) : num_(p), den_(1) {}
    RatFn(const Rational& c) : num_(c), den_(1) {}
    RatFn(int c) : num_(c), den_(1) {}
    RatFn(const Poly& num, const Poly& den);  // normalizes; den=0 throws

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_poly() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }

    RatFn operator-() const;
    friend RatFn operator+(const RatFn& a, const RatFn& b);
    friend RatFn operator-(const RatFn& a, const RatFn& b);
    friend RatFn operator*(const RatFn& a, const RatFn& b);
    friend RatFn operator/(const RatFn& a, const RatFn& b);  // b=0 throws
    RatFn& operator+=(const RatFn& o) { return *this = *this + o; }
    RatFn& operator-=(const RatFn& o) { return *this = *this - o; }
    RatFn& operator*=(const RatFn& o) { return *this = *this * o; }
    RatFn& operator/=(const RatFn& o) { return *this = *this / o; }
    friend bool operator==(const RatFn&, const RatFn&) = default;

    // Quotient rule, result canonical.
    RatFn derivative(Var v) const;

  private:
    Poly num_, den_;
    void normalize();
};

}  // namespace lfint

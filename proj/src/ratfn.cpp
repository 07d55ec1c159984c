#include "lfint/ratfn.hpp"

namespace lfint {

RatFn::RatFn(const Poly& num, const Poly& den) : num_(num), den_(den) {
    if (den_.is_zero()) throw DivisionByZero();
    normalize();
}

void RatFn::normalize() {
    if (num_.is_zero()) {
        den_ = Poly(1);
        return;
    }
    Poly g = gcd_poly(num_, den_);
    if (!g.is_constant()) {
        num_ = exact_div(num_, g);
        den_ = exact_div(den_, g);
    }
    // Move the denominator's scale into the numerator: den becomes primitive
    // with positive leading coefficient.
    Rational c = den_.content();
    if (sgn(den_.leading_coeff()) < 0) c = -c;
    if (c != 1) {
        den_.mul_scalar(Rational(1) / c);
        num_.mul_scalar(Rational(1) / c);
    }
}

RatFn RatFn::operator-() const {
    RatFn r(*this);
    r.num_ = -r.num_;
    return r;
}

RatFn operator+(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RatFn operator-(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RatFn operator*(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.num_, a.den_ * b.den_);
}

RatFn operator/(const RatFn& a, const RatFn& b) {
    if (b.is_zero()) throw DivisionByZero();
    return RatFn(a.num_ * b.den_, a.den_ * b.num_);
}

RatFn RatFn::derivative(Var v) const {
    return RatFn(num_.derivative(v) * den_ - num_ * den_.derivative(v),
                 den_ * den_);
}

}  // namespace lfint

#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace lfint {

// Power product x^ex * y^ey * z^ez. Polynomials only ever hold nonnegative
// exponents; negative entries are permitted transiently as lattice offsets
// (monomial quotients) inside the linear-recovery machinery.
struct Monomial {
    int32_t ex = 0, ey = 0, ez = 0;

    int32_t degree() const { return ex + ey + ez; }
    bool is_unit() const { return ex == 0 && ey == 0 && ez == 0; }
    bool nonnegative() const { return ex >= 0 && ey >= 0 && ez >= 0; }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        return {a.ex + b.ex, a.ey + b.ey, a.ez + b.ez};
    }
    // Quotient as a lattice offset; may go negative.
    friend Monomial operator/(const Monomial& a, const Monomial& b) {
        return {a.ex - b.ex, a.ey - b.ey, a.ez - b.ez};
    }
    bool divides(const Monomial& m) const {
        return ex <= m.ex && ey <= m.ey && ez <= m.ez;
    }
    friend Monomial gcd(const Monomial& a, const Monomial& b) {
        return {a.ex < b.ex ? a.ex : b.ex, a.ey < b.ey ? a.ey : b.ey,
                a.ez < b.ez ? a.ez : b.ez};
    }
    friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Graded lexicographic order with x > y > z: compare total degree first,
// then exponents of x, y, z in turn. This is the term order used everywhere
// (leading terms, printing, pivot enumeration).
inline std::strong_ordering glex_compare(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    if (auto c = a.ex <=> b.ex; c != 0) return c;
    if (auto c = a.ey <=> b.ey; c != 0) return c;
    return a.ez <=> b.ez;
}

inline bool glex_less(const Monomial& a, const Monomial& b) {
    return glex_compare(a, b) < 0;
}

// Map comparator putting the glex-largest monomial first.
struct GlexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return glex_compare(a, b) > 0;
    }
};

inline const Monomial kUnit{0, 0, 0};
inline const Monomial kX{1, 0, 0};
inline const Monomial kY{0, 1, 0};
inline const Monomial kZ{0, 0, 1};

enum class Var : int { x = 0, y = 1, z = 2 };

inline int32_t exponent(const Monomial& m, Var v) {
    switch (v) {
        case Var::x: return m.ex;
        case Var::y: return m.ey;
        default: return m.ez;
    }
}

inline Monomial var_monomial(Var v, int32_t e = 1) {
    switch (v) {
        case Var::x: return {e, 0, 0};
        case Var::y: return {0, e, 0};
        default: return {0, 0, e};
    }
}

inline char var_name(Var v) {
    switch (v) {
        case Var::x: return 'x';
        case Var::y: return 'y';
        default: return 'z';
    }
}

}  // namespace lfint

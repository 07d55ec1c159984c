#include "lfint/poly.hpp"

#include <algorithm>
#include <cstdint>

namespace lfint {

Poly Poly::term(const Monomial& m, const Rational& c) {
    Poly p;
    p.set(m, c);
    return p;
}

void Poly::set(const Monomial& m, const Rational& c) {
    if (lfint::is_zero(c))
        t_.erase(m);
    else
        t_[m] = c;
}

Rational Poly::constant_value() const {
    if (t_.empty()) return 0;
    return t_.begin()->second;
}

int32_t Poly::degree() const {
    if (t_.empty()) return -1;
    // Leading term has maximal total degree under glex.
    return t_.begin()->first.degree();
}

int32_t Poly::degree(Var v) const {
    if (t_.empty()) return -1;
    int32_t d = 0;
    for (const auto& [m, c] : t_) d = std::max(d, exponent(m, v));
    return d;
}

const Monomial& Poly::leading_monomial() const { return t_.begin()->first; }
const Rational& Poly::leading_coeff() const { return t_.begin()->second; }

Rational Poly::coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? Rational(0) : it->second;
}

Poly Poly::operator-() const {
    Poly r(*this);
    for (auto& [m, c] : r.t_) c = -c;
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [m, c] : o.t_) {
        auto [it, fresh] = t_.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (lfint::is_zero(it->second)) t_.erase(it);
        }
    }
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (const auto& [m, c] : o.t_) {
        auto [it, fresh] = t_.try_emplace(m, -c);
        if (!fresh) {
            it->second -= c;
            if (lfint::is_zero(it->second)) t_.erase(it);
        }
    }
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    if (a.is_zero() || b.is_zero()) return r;
    // Iterate over the smaller factor for fewer map passes.
    const Poly& s = a.term_count() <= b.term_count() ? a : b;
    const Poly& l = a.term_count() <= b.term_count() ? b : a;
    for (const auto& [m, c] : s.t_) r.add_scaled(m, c, l);
    return r;
}

Poly& Poly::mul_scalar(const Rational& c) {
    if (lfint::is_zero(c)) {
        t_.clear();
        return *this;
    }
    for (auto& [m, k] : t_) k *= c;
    return *this;
}

Poly Poly::pow(uint32_t e) const {
    Poly r(1);
    Poly base(*this);
    while (e) {
        if (e & 1) r *= base;
        base = e > 1 ? base * base : base;
        e >>= 1;
    }
    return r;
}

Poly Poly::derivative(Var v) const {
    Poly r;
    for (const auto& [m, c] : t_) {
        int32_t e = exponent(m, v);
        if (e == 0) continue;
        r.set(m / var_monomial(v), c * e);
    }
    return r;
}

Rational Poly::evaluate(const Rational& x, const Rational& y,
                        const Rational& z) const {
    // Cache powers; exponents repeat heavily in sparse polys.
    auto powers = [](const Rational& b, int32_t emax) {
        std::vector<Rational> p(emax + 1, Rational(1));
        for (int32_t i = 1; i <= emax; ++i) p[i] = p[i - 1] * b;
        return p;
    };
    if (is_zero()) return 0;
    std::vector<Rational> px = powers(x, degree(Var::x)),
                          py = powers(y, degree(Var::y)),
                          pz = powers(z, degree(Var::z));
    Rational acc(0);
    for (const auto& [m, c] : t_) acc += c * px[m.ex] * py[m.ey] * pz[m.ez];
    return acc;
}

Rational Poly::content() const {
    Rational g(0);
    for (const auto& [m, c] : t_) g = rational_gcd(g, c);
    return g;
}

Poly Poly::primitive_part() const {
    if (is_zero()) return Poly();
    Rational c = content();
    if (sgn(leading_coeff()) < 0) c = -c;
    Poly r(*this);
    r.mul_scalar(Rational(1) / c);
    return r;
}

bool Poly::has_integer_coeffs() const {
    for (const auto& [m, c] : t_)
        if (c.get_den() != 1) return false;
    return true;
}

void Poly::add_scaled(const Monomial& m, const Rational& c, const Poly& p) {
    if (lfint::is_zero(c)) return;
    for (const auto& [pm, pc] : p.t_) {
        Monomial tm = pm * m;
        auto [it, fresh] = t_.try_emplace(tm, Rational());
        if (fresh)
            it->second = c * pc;
        else {
            it->second += c * pc;
            if (lfint::is_zero(it->second)) t_.erase(it);
        }
    }
}

std::optional<Poly> try_exact_div(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw DivisionByZero();
    Poly q, r(a);
    const Monomial& lmb = b.leading_monomial();
    const Rational& lcb = b.leading_coeff();
    while (!r.is_zero()) {
        const Monomial& lmr = r.leading_monomial();
        if (!lmb.divides(lmr)) return std::nullopt;
        Monomial m = lmr / lmb;
        Rational c = r.leading_coeff() / lcb;
        q.set(m, c);
        r.add_scaled(m, -c, b);
    }
    return q;
}

Poly exact_div(const Poly& a, const Poly& b) {
    auto q = try_exact_div(a, b);
    if (!q) throw NotDivisible();
    return *q;
}

std::map<int32_t, Poly> collect_by_var(const Poly& p, Var v) {
    std::map<int32_t, Poly> out;
    for (const auto& [m, c] : p.terms()) {
        int32_t e = exponent(m, v);
        out[e].set(m / var_monomial(v, e), c);
    }
    return out;
}

Poly assemble_by_var(const std::map<int32_t, Poly>& coeffs, Var v) {
    Poly r;
    for (const auto& [e, p] : coeffs) {
        Poly shifted;
        for (const auto& [m, c] : p.terms()) shifted.set(m * var_monomial(v, e), c);
        r += shifted;
    }
    return r;
}

Poly pseudo_rem(const Poly& a, const Poly& b, Var v) {
    int32_t db = b.degree(v);
    if (db < 0) throw DivisionByZero();
    auto bc = collect_by_var(b, v);
    Poly lb = bc.rbegin()->second;  // coefficient of v^db
    Poly r(a);
    int32_t dr = r.degree(v);
    while (!r.is_zero() && dr >= db) {
        auto rc = collect_by_var(r, v);
        Poly lr = rc.rbegin()->second;
        // r := lb * r - lr * v^(dr-db) * b
        Poly next = lb * r;
        Poly sub = lr * b;
        Poly shifted;
        for (const auto& [m, c] : sub.terms())
            shifted.set(m * var_monomial(v, dr - db), c);
        next -= shifted;
        r = std::move(next);
        dr = r.degree(v);
    }
    return r;
}

namespace {

// Strip the common power-product of all terms: x^a y^b z^c with a,b,c minimal.
Monomial monomial_content(const Poly& p) {
    Monomial g = p.leading_monomial();
    for (const auto& [m, c] : p.terms()) {
        g = gcd(g, m);
        if (g.is_unit()) break;
    }
    return g;
}

Poly divide_monomial(const Poly& p, const Monomial& m) {
    Poly r;
    for (const auto& [pm, c] : p.terms()) r.set(pm / m, c);
    return r;
}

// ---- coprimality certificates over a word-size prime field ----------------
// A nonconstant common factor of two polynomials must have positive degree in
// some variable shared by both. For any such variable v, leading coefficients
// (as univariate polynomials in v) multiply, so at an evaluation point of the
// other variables that preserves both leading coefficients (checked modulo p
// via the image degree), the factor's image keeps positive degree and divides
// both images. A constant gcd of the images therefore certifies that no
// common factor with positive v-degree exists. Unlucky points or primes only
// cost a fallback to the exact remainder-sequence path, never correctness.

constexpr uint64_t kProjPrime = 2305843009213693951ull;  // 2^61 - 1

uint64_t mulmod_p(uint64_t a, uint64_t b) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b %
                                 kProjPrime);
}

uint64_t powmod_p(uint64_t a, uint64_t e) {
    uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod_p(r, a);
        a = mulmod_p(a, a);
        e >>= 1;
    }
    return r;
}

// Image of p as a univariate polynomial in v modulo kProjPrime, with the two
// remaining variables evaluated at s and t. Requires integer coefficients
// (guaranteed for primitive parts); empty result signals an unusable input.
std::vector<uint64_t> project_univariate_modp(const Poly& p, Var v, uint64_t s,
                                              uint64_t t) {
    Var o1 = Var::x, o2 = Var::y;
    if (v == Var::x) {
        o1 = Var::y;
        o2 = Var::z;
    } else if (v == Var::y) {
        o1 = Var::x;
        o2 = Var::z;
    }
    const int32_t d1 = std::max(p.degree(o1), 0);
    const int32_t d2 = std::max(p.degree(o2), 0);
    const int32_t dv = std::max(p.degree(v), 0);
    std::vector<uint64_t> pw1(d1 + 1, 1), pw2(d2 + 1, 1);
    for (int32_t i = 1; i <= d1; ++i) pw1[i] = mulmod_p(pw1[i - 1], s);
    for (int32_t i = 1; i <= d2; ++i) pw2[i] = mulmod_p(pw2[i - 1], t);
    std::vector<uint64_t> out(dv + 1, 0);
    for (const auto& [m, c] : p.terms()) {
        if (c.get_den() != 1) return {};
        uint64_t cv = mpz_fdiv_ui(c.get_num().get_mpz_t(), kProjPrime);
        cv = mulmod_p(cv, mulmod_p(pw1[exponent(m, o1)], pw2[exponent(m, o2)]));
        uint64_t& slot = out[exponent(m, v)];
        slot += cv;
        if (slot >= kProjPrime) slot -= kProjPrime;
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

int univ_gcd_degree_modp(std::vector<uint64_t> a, std::vector<uint64_t> b) {
    auto trim = [](std::vector<uint64_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    trim(a);
    trim(b);
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
        const uint64_t inv = powmod_p(b.back(), kProjPrime - 2);
        while (a.size() >= b.size()) {
            const uint64_t q = mulmod_p(a.back(), inv);
            const size_t shift = a.size() - b.size();
            for (size_t i = 0; i + 1 < b.size(); ++i) {
                const uint64_t sub = mulmod_p(q, b[i]);
                uint64_t& slot = a[shift + i];
                slot = slot >= sub ? slot - sub : slot + kProjPrime - sub;
            }
            a.pop_back();
            trim(a);
        }
        std::swap(a, b);
    }
    return static_cast<int>(a.size()) - 1;
}

bool coprime_certified(const Poly& pa, const Poly& pb, Var v) {
    struct Pt {
        uint64_t s, t;
    };
    static constexpr Pt kPts[] = {{2, 3}, {5, 7}, {11, 13}};
    const int32_t da = pa.degree(v), db = pb.degree(v);
    for (const Pt& pt : kPts) {
        auto a = project_univariate_modp(pa, v, pt.s, pt.t);
        if (static_cast<int32_t>(a.size()) - 1 != da) continue;
        auto b = project_univariate_modp(pb, v, pt.s, pt.t);
        if (static_cast<int32_t>(b.size()) - 1 != db) continue;
        if (univ_gcd_degree_modp(std::move(a), std::move(b)) == 0) return true;
    }
    return false;
}

// Gcd of the Poly coefficients of p viewed as univariate in v.
Poly var_content(const Poly& p, Var v) {
    Poly g;
    for (const auto& [e, c] : collect_by_var(p, v)) {
        g = gcd_poly(g, c);
        if (g.is_constant() && !g.is_zero()) break;
    }
    return g;
}

}  // namespace

Poly gcd_poly(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.primitive_part();
    if (b.is_zero()) return a.primitive_part();

    Monomial ma = monomial_content(a), mb = monomial_content(b);
    Monomial mg = gcd(ma, mb);
    Poly pa = divide_monomial(a, ma).primitive_part();
    Poly pb = divide_monomial(b, mb).primitive_part();
    Poly mono = Poly::term(mg, 1);

    if (pa.is_constant() || pb.is_constant()) return mono;
    // Cheap wins first: equal or one divides the other (common in pipelines).
    if (pa == pb) return mono * pa;
    if (pa.term_count() <= pb.term_count() && try_exact_div(pb, pa))
        return mono * pa;
    if (pb.term_count() < pa.term_count() && try_exact_div(pa, pb))
        return mono * pb;

    // Try to certify a trivial gcd per shared variable before any remainder
    // sequence; keep the first variable that resists as the PRS main variable.
    std::optional<Var> v;
    bool any_shared = false;
    for (Var w : {Var::x, Var::y, Var::z}) {
        if (pa.degree(w) <= 0 || pb.degree(w) <= 0) continue;
        any_shared = true;
        if (!coprime_certified(pa, pb, w)) {
            v = w;
            break;
        }
    }
    if (!any_shared || !v) return mono;

    // Primitive PRS in the chosen main variable.
    Poly ca = var_content(pa, *v);
    Poly cb = var_content(pb, *v);
    Poly ppa = exact_div(pa, ca), ppb = exact_div(pb, cb);
    Poly r0 = ppa, r1 = ppb;
    if (r0.degree(*v) < r1.degree(*v)) std::swap(r0, r1);
    while (true) {
        Poly r2 = pseudo_rem(r0, r1, *v);
        if (r2.is_zero()) break;
        if (r2.degree(*v) <= 0) {
            // Nontrivial remainder free of v: the univariate gcd is trivial.
            r1 = Poly(1);
            break;
        }
        Poly c = var_content(r2, *v);
        r0 = std::move(r1);
        r1 = exact_div(r2, c).primitive_part();
    }
    Poly result = mono * gcd_poly(ca, cb);
    if (!r1.is_constant()) {
        Poly g = exact_div(r1, var_content(r1, *v)).primitive_part();
        // The PRS gcd may still contain spurious content factors; it is a
        // genuine divisor only if exact division certifies it.
        if (try_exact_div(pa, g) && try_exact_div(pb, g)) result *= g;
    }
    return result.primitive_part();
}

}  // namespace lfint

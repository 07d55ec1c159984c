#include "lfint/sfunction.hpp"

#include <algorithm>
#include <stdexcept>

namespace lfint {

Poly apply_field(const VField& v, const Poly& p) {
    return v.fx * p.derivative(Var::x) + v.fy * p.derivative(Var::y) +
           v.fz * p.derivative(Var::z);
}

RatFn apply_field(const VField& v, const RatFn& f) {
    return RatFn(v.fx) * f.derivative(Var::x) + RatFn(v.fy) * f.derivative(Var::y) +
           RatFn(v.fz) * f.derivative(Var::z);
}

Poly divergence(const VField& v) {
    return v.fx.derivative(Var::x) + v.fy.derivative(Var::y) +
           v.fz.derivative(Var::z);
}

VField associated_field(const Ode2& ode) {
    return {ode.n0, Poly::variable(Var::z) * ode.n0, ode.m0};
}

RatFn dx_total(const Ode2& ode, const RatFn& f) {
    const RatFn zr(Poly::variable(Var::z));
    return f.derivative(Var::x) + zr * f.derivative(Var::y) +
           ode.phi() * f.derivative(Var::z);
}

RatFn spde_residual(const Ode2& ode, const RatFn& s, int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("spde_residual: k must be 1, 2 or 3");
    if (k == 3 && ode.m0.is_zero()) throw DegenerateEquation();
    // Left-minus-right of the k-th defining equation, computed over the
    // common denominator instead of by rational-function arithmetic: the
    // cleared numerator is a plain polynomial combination, and the
    // denominator's factorization is known, which keeps the final
    // normalization cheap.
    const Poly zp = Poly::variable(Var::z);
    const Poly& a = s.num();
    const Poly& b = s.den();
    const Poly ta = ode.n0 * (a.derivative(Var::x) + zp * a.derivative(Var::y)) +
                    ode.m0 * a.derivative(Var::z);
    const Poly tb = ode.n0 * (b.derivative(Var::x) + zp * b.derivative(Var::y)) +
                    ode.m0 * b.derivative(Var::z);
    const Poly core = b * ta - a * tb;
    const Poly aa = a * a, ab = a * b, bb = b * b;
    auto w = [&](Var v) {
        return ode.n0 * ode.m0.derivative(v) - ode.m0 * ode.n0.derivative(v);
    };
    Poly e;
    std::vector<Poly> den_factors = {ode.n0, ode.n0, b, b};
    switch (k) {
        case 1:
            e = core * ode.n0 - aa * (ode.n0 * ode.n0) - ab * w(Var::z) +
                bb * w(Var::y);
            break;
        case 2:
            e = core * (zp * ode.n0) + aa * (ode.n0 * ode.n0) -
                ab * (zp * w(Var::z) - ode.n0 * ode.m0) + bb * (zp * w(Var::x));
            den_factors.push_back(zp);
            break;
        default:
            e = core * ode.m0 + aa * w(Var::y) -
                ab * (w(Var::x) - zp * w(Var::y)) - bb * (zp * w(Var::x));
            den_factors = {ode.n0, ode.m0, b, b};
            break;
    }
    if (e.is_zero()) return RatFn();
    Poly den(1);
    for (Poly f : den_factors) {
        const Poly g = gcd_poly(e, f);
        if (!g.is_constant()) {
            e = exact_div(e, g);
            f = exact_div(f, g);
        }
        den = den * f;
    }
    return RatFn(e, den);
}

namespace {

// N0*(d/dx + z d/dy) + M0*d/dz applied to an undetermined-coefficient
// polynomial; the polynomial part of the total derivative.
AnsatzPoly transport(const Ode2& ode, const AnsatzPoly& g) {
    AnsatzPoly r = ansatz_mul_poly(ansatz_derivative(g, Var::x), ode.n0);
    ansatz_add(r, ansatz_mul_poly(ansatz_derivative(g, Var::y),
                                  Poly::variable(Var::z) * ode.n0));
    ansatz_add(r, ansatz_mul_poly(ansatz_derivative(g, Var::z), ode.m0));
    return r;
}

Poly wronskian(const Ode2& ode, Var v) {
    return ode.n0 * ode.m0.derivative(v) - ode.m0 * ode.n0.derivative(v);
}

}  // namespace

std::vector<RatFn> find_sfunction(const Ode2& ode, int k, DegreeBounds bounds,
                                  const QuadSolveCaps& caps,
                                  int max_candidates, uint64_t* work_used) {
    if (work_used) *work_used = 0;
    if (k < 1 || k > 3) throw std::invalid_argument("find_sfunction: bad k");
    if (k == 3 && ode.m0.is_zero()) throw DegenerateEquation();
    const Poly zp = Poly::variable(Var::z);
    const Poly wx = wronskian(ode, Var::x);
    const Poly wy = wronskian(ode, Var::y);
    const Poly wz = wronskian(ode, Var::z);

    const auto num_support = monomials_up_to_degree(bounds.num);
    const auto den_support = monomials_up_to_degree(bounds.den);
    const uint32_t na = static_cast<uint32_t>(num_support.size());
    const uint32_t total = na + static_cast<uint32_t>(den_support.size());

    const AnsatzPoly a = ansatz_linear(num_support, 0);
    const AnsatzPoly b = ansatz_linear(den_support, na);
    AnsatzPoly core = ansatz_mul(b, transport(ode, a));
    ansatz_sub(core, ansatz_mul(a, transport(ode, b)));
    const AnsatzPoly aa = ansatz_mul(a, a);
    const AnsatzPoly ab = ansatz_mul(a, b);
    const AnsatzPoly bb = ansatz_mul(b, b);

    // Denominator-cleared form of the k-th defining equation: a polynomial
    // identity bilinear/quadratic in the coefficients of a and b.
    AnsatzPoly eq;
    switch (k) {
        case 1:
            eq = ansatz_mul_poly(core, ode.n0);
            ansatz_sub(eq, ansatz_mul_poly(aa, ode.n0 * ode.n0));
            ansatz_sub(eq, ansatz_mul_poly(ab, wz));
            ansatz_add(eq, ansatz_mul_poly(bb, wy));
            break;
        case 2:
            eq = ansatz_mul_poly(core, zp * ode.n0);
            ansatz_add(eq, ansatz_mul_poly(aa, ode.n0 * ode.n0));
            ansatz_sub(eq, ansatz_mul_poly(ab, zp * wz - ode.n0 * ode.m0));
            ansatz_add(eq, ansatz_mul_poly(bb, zp * wx));
            break;
        default:
            eq = ansatz_mul_poly(core, ode.m0);
            ansatz_add(eq, ansatz_mul_poly(aa, wy));
            ansatz_sub(eq, ansatz_mul_poly(ab, wx - zp * wy));
            ansatz_sub(eq, ansatz_mul_poly(bb, zp * wx));
            break;
    }
    const std::vector<QuadForm> eqs = ansatz_equations(eq);

    // The identity is homogeneous of degree 2 in the joint coefficient
    // vector and every admissible solution has b != 0, so solutions are
    // enumerated on the b != 0 chart: pin the first nonzero b-coefficient to
    // 1, position by position, zeroing the b-prefix incrementally.
    std::vector<RatFn> found;
    bool truncated = false;
    uint64_t sweep_work = 0;
    std::vector<QuadForm> master = eqs;
    for (uint32_t t = 0; t < total - na; ++t) {
        if (sweep_work > caps.sweep_work_budget) {
            truncated = true;
            break;
        }
        const uint32_t pivot = na + t;
        PolySystem sys;
        sys.num_unknowns = total;
        sys.equations = master;
        for (auto& e : sys.equations)
            e.substitute_consts({{pivot, Rational(1)}});
        QuadSolveResult res = solve_quadratic_bounded(sys, caps);
        truncated = truncated || res.budget_exceeded;
        sweep_work += res.work_used;
        if (work_used) *work_used = sweep_work;
        for (auto pt : res.solutions) {
            pt[pivot] = 1;  // re-attach the pinned coordinate
            const Poly bp = ansatz_instantiate(b, pt);
            if (bp.is_zero()) continue;
            const Poly ap = ansatz_instantiate(a, pt);
            RatFn s(ap, bp);
            if (!spde_residual(ode, s, k).is_zero()) continue;
            if (std::find(found.begin(), found.end(), s) == found.end())
                found.push_back(std::move(s));
        }
        if (max_candidates > 0 &&
            found.size() >= static_cast<size_t>(max_candidates))
            break;
        // Move the pinned position out of play for the remaining pivots. A
        // nonzero constant equation means no solution has the whole prefix
        // zero, so the sweep can stop early.
        bool infeasible = false;
        std::vector<QuadForm> keep;
        keep.reserve(master.size());
        for (auto& e : master) {
            e.zero_out(pivot);
            if (e.is_zero()) continue;
            if (e.is_constant()) {
                infeasible = true;
                break;
            }
            keep.push_back(std::move(e));
        }
        if (infeasible) break;
        master = std::move(keep);
    }
    if (found.empty() && truncated) throw BudgetExceeded();
    std::sort(found.begin(), found.end(), [](const RatFn& u, const RatFn& v) {
        const int32_t du = u.num().degree() + u.den().degree();
        const int32_t dv = v.num().degree() + v.den().degree();
        if (du != dv) return du < dv;
        return format_expression(u) < format_expression(v);
    });
    return found;
}

STriple build_triple(const Ode2& ode, const RatFn& s, int k) {
    const Poly zp = Poly::variable(Var::z);
    const Poly& a = s.num();
    const Poly& b = s.den();
    STriple t;
    switch (k) {
        case 1:
            t.p = a * ode.n0;
            t.n = b * ode.n0;
            t.q = -(zp * t.p) - ode.m0 * b;
            break;
        case 2:
            t.q = a * zp * ode.n0;
            t.p = -(a * ode.n0 + ode.m0 * b);
            t.n = b * zp * ode.n0;
            break;
        case 3:
            if (ode.m0.is_zero()) throw DegenerateTriple();
            t.q = a * ode.m0;
            t.p = b * ode.m0;
            t.n = -((a + zp * b) * ode.n0);
            break;
        default:
            throw std::invalid_argument("build_triple: k must be 1, 2 or 3");
    }
    const Poly g = gcd_poly(gcd_poly(t.q, t.p), t.n);
    if (!g.is_constant()) {
        t.q = exact_div(t.q, g);
        t.p = exact_div(t.p, g);
        t.n = exact_div(t.n, g);
    }
    Rational c(0);
    for (const Poly* f : {&t.q, &t.p, &t.n})
        if (!f->is_zero())
            c = is_zero(c) ? f->content() : rational_gcd(c, f->content());
    if (!is_zero(c) && c != 1) {
        const Rational inv = Rational(1) / c;
        t.q.mul_scalar(inv);
        t.p.mul_scalar(inv);
        t.n.mul_scalar(inv);
    }
    const Poly* lead = !t.n.is_zero() ? &t.n : (!t.p.is_zero() ? &t.p : &t.q);
    if (!lead->is_zero() && sgn(lead->leading_coeff()) < 0) {
        t.q = -t.q;
        t.p = -t.p;
        t.n = -t.n;
    }
    if (t.n.is_zero() || t.p.is_zero()) throw DegenerateTriple();
    t.s1 = RatFn(t.p, t.n);
    t.s2 = RatFn(t.q, t.n);
    t.s3 = RatFn(t.q, t.p);
    t.x1 = {Poly(), t.n, -t.p};
    t.x2 = {-t.n, Poly(), t.q};
    t.x3 = {t.p, -t.q, Poly()};
    return t;
}

std::string associated_1ode(const RatFn& s, int k) {
    const RatFn rhs = -s;
    std::string txt;
    if (rhs.num().term_count() == 1 && sgn(rhs.num().leading_coeff()) < 0)
        txt = "-" + format_expression(-rhs);
    else
        txt = format_expression(rhs);
    switch (k) {
        case 3:
            return "dy/dx = " + txt + " (z parameter)";
        case 2:
            return "dz/dx = " + txt + " (y parameter)";
        case 1:
            return "dz/dy = " + txt + " (x parameter)";
        default:
            throw std::invalid_argument("associated_1ode: k must be 1, 2 or 3");
    }
}

}  // namespace lfint

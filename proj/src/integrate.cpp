#include "lfint/integrate.hpp"

#include <algorithm>

#include "lfint/linsolve.hpp"
#include "lfint/quadsolve.hpp"

namespace lfint {

namespace {

const VField* triple_field(const STriple& t, int i) {
    switch (i) {
        case 1: return &t.x1;
        case 2: return &t.x2;
        default: return &t.x3;
    }
}

bool is_integer(const Rational& r) { return r.get_den() == 1; }

long to_long(const Rational& r) { return r.get_num().get_si(); }

std::optional<AffineSolution> solve_affine(const std::vector<QuadForm>& eqs,
                                           uint32_t n) {
    LinearSystem ls;
    ls.num_unknowns = n;
    for (const QuadForm& e : eqs) {
        LinEq le;
        le.constant = e.c;
        for (const auto& [u, v] : e.lin) le.add(u, v);
        ls.equations.push_back(std::move(le));
    }
    return solve_linear(ls);
}

Poly poly_pow(const Poly& p, long e) {
    return p.pow(static_cast<uint32_t>(e));
}

// prod_j p_j^{n_j} as an exact rational function; nullopt when an exponent
// is not an integer (no rational gradient target exists then).
std::optional<RatFn> rational_core(
    const std::vector<std::pair<Poly, Rational>>& factors) {
    Poly num(1), den(1);
    for (const auto& [p, n] : factors) {
        if (!is_integer(n)) return std::nullopt;
        const long e = to_long(n);
        if (e >= 0)
            num *= poly_pow(p, e);
        else
            den *= poly_pow(p, -e);
    }
    return RatFn(num, den);
}

RatFn scale(const RatFn& f, const Rational& c) { return RatFn(Poly(c)) * f; }

struct LadderEntry {
    Poly p;
    std::vector<long> options;  // ascending multiplicities to try
};

// One denominator combination; advances odometer-style. Returns false when
// exhausted.
bool next_combo(const std::vector<LadderEntry>& ladder,
                std::vector<size_t>& idx) {
    for (size_t k = 0; k < idx.size(); ++k) {
        if (++idx[k] < ladder[k].options.size()) return true;
        idx[k] = 0;
    }
    return false;
}

void strip_additive_constant(RatFn& f) {
    if (!f.is_zero() && f.den().is_constant()) {
        Poly n = f.num();
        const Rational d = f.den().constant_value();
        n.set(kUnit, Rational(0));
        f = RatFn(n, Poly(d));
    }
}

// Inserts v into a pairwise-coprime basis, splitting existing elements on
// nontrivial common divisors. Elements stay primitive with positive leading
// coefficient; constants are dropped.
void coprime_insert(std::vector<Poly>& base, Poly v) {
    v = v.primitive_part();
    if (v.degree() <= 0) return;
    for (size_t i = 0; i < base.size(); ++i) {
        if (v == base[i]) return;
        Poly g = gcd_poly(v, base[i]);
        if (g.degree() <= 0) continue;
        Poly u = std::move(base[i]);
        base.erase(base.begin() + static_cast<ptrdiff_t>(i));
        coprime_insert(base, g);
        coprime_insert(base, exact_div(u, g));
        coprime_insert(base, exact_div(v, g));
        return;
    }
    base.push_back(std::move(v));
}

// gcd of u with its three partials: the repeated part of u, constant iff u
// is square-free.
Poly repeated_part(const Poly& u) {
    Poly g = gcd_poly(u, u.derivative(Var::x));
    if (g.degree() <= 0) return g;
    g = gcd_poly(g, u.derivative(Var::y));
    if (g.degree() <= 0) return g;
    return gcd_poly(g, u.derivative(Var::z));
}

// Pairwise-coprime square-free divisors of the factor polynomials together
// with the accumulated exponent of each, ordered by (degree, canonical
// string). Hints participate in the splitting; divisors of nothing get
// exponent zero and are discarded by the caller's filter.
std::vector<std::pair<Poly, Rational>> refine_factors(
    const std::vector<std::pair<Poly, Rational>>& factors,
    const std::vector<Poly>& hints) {
    std::vector<Poly> base;
    for (const auto& [p, n] : factors) coprime_insert(base, p);
    for (const Poly& h : hints) coprime_insert(base, h);
    // Square-free fixpoint: split any element with a repeated part.
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 0; i < base.size(); ++i) {
            Poly rep = repeated_part(base[i]);
            if (rep.degree() <= 0) continue;
            Poly u = std::move(base[i]);
            base.erase(base.begin() + static_cast<ptrdiff_t>(i));
            coprime_insert(base, rep);
            coprime_insert(base, exact_div(u, rep));
            changed = true;
            break;
        }
    }
    std::sort(base.begin(), base.end(), [](const Poly& a, const Poly& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return format_expression(a) < format_expression(b);
    });
    std::vector<std::pair<Poly, Rational>> out;
    for (const Poly& u : base) {
        Rational acc(0);
        for (const auto& [p, n] : factors) {
            Poly rem = p;
            for (auto q = try_exact_div(rem, u); q; q = try_exact_div(rem, u)) {
                rem = std::move(*q);
                acc += n;
            }
        }
        out.emplace_back(u, acc);
    }
    return out;
}

}  // namespace

IntegratingFactor assemble_R(
    const STriple& t, const ExpPart& exp,
    const std::vector<std::pair<DarbouxPair, Rational>>& factors) {
    for (int i = 1; i <= 3; ++i) {
        Poly residual = divergence(*triple_field(t, i));
        if (auto it = exp.pi.find(i); it != exp.pi.end()) residual += it->second;
        for (const auto& [dp, n] : factors) {
            Poly term = dp.cofactors.at(i);
            term.mul_scalar(n);
            residual += term;
        }
        if (!residual.is_zero()) throw IdentityFails(i, residual);
    }
    IntegratingFactor r;
    r.exp = exp;
    for (const auto& [dp, n] : factors) r.factors.emplace_back(dp.p, n);
    return r;
}

FirstIntegralForm integrate_closed_form(const IntegratingFactor& r,
                                        const STriple& t, int32_t deg_c,
                                        const std::vector<Poly>& refine_hints) {
    const auto core = rational_core(r.factors);
    if (!core) throw AnsatzExhausted();
    const bool case_b = !r.exp.a.is_zero();
    const Poly* comps[3] = {&t.q, &t.p, &t.n};
    const Var vars[3] = {Var::x, Var::y, Var::z};

    // Only basis elements carrying a pole of R can show up in J's
    // denominator or under a log, so the others are dropped.
    std::vector<std::pair<Poly, Rational>> poles;
    for (auto& [p, n] : refine_factors(r.factors, refine_hints))
        if (n < 0) poles.emplace_back(std::move(p), n);

    std::vector<LadderEntry> ladder;
    for (const auto& [p, n] : poles) {
        const long e = to_long(n);
        LadderEntry le;
        le.p = p;
        const long hi = std::max<long>(0, -e);
        const long lo = std::max<long>(0, -e - 1);
        for (long m = lo; m <= hi; ++m) le.options.push_back(m);
        ladder.push_back(std::move(le));
    }
    if (case_b && !r.exp.b.is_constant())
        ladder.push_back({r.exp.b, {0, 1, 2}});
    if (ladder.empty()) ladder.push_back({Poly(1), {0}});

    const auto c_supp = monomials_up_to_degree(deg_c);
    const uint32_t nc = static_cast<uint32_t>(c_supp.size());
    const AnsatzPoly c_ansatz = ansatz_linear(c_supp, 0);

    std::vector<size_t> idx(ladder.size(), 0);
    do {
        Poly d(1);
        for (size_t k = 0; k < ladder.size(); ++k)
            d *= poly_pow(ladder[k].p, ladder[k].options[idx[k]]);

        if (!case_b) {
            // J = C/D + sum_k c_k ln(p_k); log arguments are the refined
            // pole divisors.
            Poly all(1);
            std::vector<Poly> args;
            for (const auto& [p, n] : poles) {
                args.push_back(p);
                all *= p;
            }
            const uint32_t total = nc + static_cast<uint32_t>(args.size());
            std::vector<QuadForm> eqs;
            bool feasible = true;
            for (int v = 0; v < 3 && feasible; ++v) {
                const RatFn target =
                    *core * RatFn(*comps[v]) * RatFn(d * d * all);
                if (!target.is_poly()) {
                    feasible = false;
                    break;
                }
                AnsatzPoly lhs = ansatz_mul_poly(
                    ansatz_derivative(c_ansatz, vars[v]), d * all);
                ansatz_sub(lhs, ansatz_mul_poly(c_ansatz,
                                                d.derivative(vars[v]) * all));
                for (size_t k = 0; k < args.size(); ++k) {
                    const Poly w =
                        d * d * args[k].derivative(vars[v]) * exact_div(all, args[k]);
                    AnsatzPoly term;
                    for (const auto& [m, cf] : w.terms()) {
                        QuadForm f = QuadForm::unknown(nc + static_cast<uint32_t>(k));
                        f.mul_scalar(cf);
                        term.emplace(m, std::move(f));
                    }
                    ansatz_add(lhs, term);
                }
                ansatz_sub(lhs, ansatz_from_poly(target.num()));
                for (QuadForm& e : ansatz_equations(lhs))
                    eqs.push_back(std::move(e));
            }
            if (!feasible) continue;
            const auto sol = solve_affine(eqs, total);
            if (!sol) continue;
            const auto& pt = sol->particular;
            Poly c;
            for (size_t k = 0; k < c_supp.size(); ++k) c.set(c_supp[k], pt[k]);
            FirstIntegralForm j;
            j.rational_part = RatFn(c, d);
            for (size_t k = 0; k < args.size(); ++k)
                if (!is_zero(pt[nc + k]))
                    j.log_terms.emplace_back(pt[nc + k], args[k]);
            strip_additive_constant(j.rational_part);
            if (j.rational_part.is_zero() && j.log_terms.empty()) continue;
            const Rational lambda = !j.rational_part.is_zero()
                                        ? j.rational_part.num().leading_coeff()
                                        : j.log_terms.front().first;
            j.rational_part = scale(j.rational_part, Rational(1) / lambda);
            for (auto& [ck, arg] : j.log_terms) ck /= lambda;
            j.presentation = j.log_terms.empty() ? Presentation::additive
                                                 : Presentation::exponential;
            return j;
        }

        // Case B: J = e^{a/b} C/D.
        const Poly& a = r.exp.a;
        const Poly& b = r.exp.b;
        std::vector<QuadForm> eqs;
        bool feasible = true;
        for (int v = 0; v < 3 && feasible; ++v) {
            const RatFn target =
                *core * RatFn(*comps[v]) * RatFn(b * b * d * d);
            if (!target.is_poly()) {
                feasible = false;
                break;
            }
            const Poly wnum = a.derivative(vars[v]) * b - a * b.derivative(vars[v]);
            AnsatzPoly lhs = ansatz_mul_poly(c_ansatz, wnum * d);
            ansatz_add(lhs, ansatz_mul_poly(ansatz_derivative(c_ansatz, vars[v]),
                                            d * (b * b)));
            ansatz_sub(lhs,
                       ansatz_mul_poly(c_ansatz, d.derivative(vars[v]) * (b * b)));
            ansatz_sub(lhs, ansatz_from_poly(target.num()));
            for (QuadForm& e : ansatz_equations(lhs)) eqs.push_back(std::move(e));
        }
        if (!feasible) continue;
        const auto sol = solve_affine(eqs, nc);
        if (!sol) continue;
        Poly c;
        for (size_t k = 0; k < c_supp.size(); ++k)
            c.set(c_supp[k], sol->particular[k]);
        if (c.is_zero()) continue;
        FirstIntegralForm j;
        FirstIntegralForm::ExpTerm et;
        et.w = RatFn(a, b);
        et.coeff = RatFn(c, d);
        const Rational lambda = et.coeff.num().leading_coeff();
        et.coeff = scale(et.coeff, Rational(1) / lambda);
        j.exp_term = std::move(et);
        j.presentation = Presentation::exponential;
        return j;
    } while (next_combo(ladder, idx));
    throw AnsatzExhausted();
}

IntegralResidual verify_first_integral(const Ode2& ode,
                                       const FirstIntegralForm& j) {
    const VField x = associated_field(ode);
    IntegralResidual res;
    res.plain = apply_field(x, j.rational_part);
    for (const auto& [c, arg] : j.log_terms)
        res.plain += scale(RatFn(apply_field(x, arg), arg), c);
    if (j.exp_term) {
        res.exp_arg = j.exp_term->w;
        res.exp_coeff = apply_field(x, j.exp_term->w) * j.exp_term->coeff +
                        apply_field(x, j.exp_term->coeff);
    }
    return res;
}

}  // namespace lfint

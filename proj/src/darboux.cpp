#include "lfint/darboux.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "lfint/expr.hpp"
#include "lfint/linsolve.hpp"

namespace lfint {

namespace {

int32_t field_maxdeg(const VField& x) {
    return std::max({x.fx.degree(), x.fy.degree(), x.fz.degree(), int32_t(0)});
}

bool field_is_zero(const VField& x) {
    return x.fx.is_zero() && x.fy.is_zero() && x.fz.is_zero();
}

// The variable along which the field does not differentiate (first zero
// component in x, y, z order); nullopt for a field with all three active.
std::optional<Var> param_var(const VField& x) {
    if (x.fx.is_zero()) return Var::x;
    if (x.fy.is_zero()) return Var::y;
    if (x.fz.is_zero()) return Var::z;
    return std::nullopt;
}

int32_t coeff_degree_in(const VField& x, Var v) {
    return std::max({x.fx.degree(v), x.fy.degree(v), x.fz.degree(v), int32_t(0)});
}

// Candidate support: combined degree <= deg_main in the active variables,
// <= deg_param in the parameter variable; descending glex.
std::vector<Monomial> plane_support(const VField& x, int32_t deg_main,
                                    int32_t deg_param) {
    const auto pv = param_var(x);
    if (!pv) return monomials_up_to_degree(deg_main);
    std::vector<Monomial> ms;
    for (const Monomial& m : monomials_up_to_degree(deg_main + deg_param)) {
        const int32_t ep = exponent(m, *pv);
        if (ep <= deg_param && m.degree() - ep <= deg_main) ms.push_back(m);
    }
    return ms;
}

AnsatzPoly apply_field_ansatz(const VField& x, const AnsatzPoly& p) {
    AnsatzPoly r = ansatz_mul_poly(ansatz_derivative(p, Var::x), x.fx);
    ansatz_add(r, ansatz_mul_poly(ansatz_derivative(p, Var::y), x.fy));
    ansatz_add(r, ansatz_mul_poly(ansatz_derivative(p, Var::z), x.fz));
    return r;
}

std::optional<AffineSolution> solve_affine_equations(
    const std::vector<QuadForm>& eqs, uint32_t n) {
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

// Cofactor-zero candidates: the kernel of X on the support, found linearly.
void kernel_pass(const VField& x, const std::vector<Monomial>& support,
                 std::vector<Poly>& out) {
    const AnsatzPoly p = ansatz_linear(support, 0);
    const auto sol = solve_affine_equations(ansatz_equations(apply_field_ansatz(x, p)),
                                            static_cast<uint32_t>(support.size()));
    if (!sol) return;
    for (const auto& vec : sol->basis) {
        Poly cand = ansatz_instantiate(p, vec);
        if (!cand.is_zero() && !cand.is_constant()) out.push_back(cand);
    }
}

// Divisor candidates read off the field's own coefficients: the variables,
// the primitive components, pairwise gcds, and repeated-factor parts.
void harvest_pass(const VField& x, std::vector<Poly>& out) {
    out.push_back(Poly::variable(Var::x));
    out.push_back(Poly::variable(Var::y));
    out.push_back(Poly::variable(Var::z));
    const Poly* comps[3] = {&x.fx, &x.fy, &x.fz};
    std::vector<Poly> parts;
    for (const Poly* f : comps)
        if (!f->is_zero() && !f->is_constant()) parts.push_back(f->primitive_part());
    for (size_t i = 0; i < parts.size(); ++i) {
        out.push_back(parts[i]);
        for (size_t j = i + 1; j < parts.size(); ++j) {
            Poly g = gcd_poly(parts[i], parts[j]);
            if (!g.is_constant()) out.push_back(g);
        }
        for (Var v : {Var::x, Var::y, Var::z}) {
            const Poly d = parts[i].derivative(v);
            if (d.is_zero()) continue;
            Poly g = gcd_poly(parts[i], d);
            if (!g.is_constant()) out.push_back(g);
        }
    }
}

// Full undetermined-coefficient search: X(p) - q*p = 0 is bilinear in the
// coefficient blocks of p and q; p is projective (scale-invariant), so its
// first nonzero coefficient is pinned to 1 per pivot.
constexpr size_t kMucUnknownCap = 340;

void muc_pass(const VField& x, const std::vector<Monomial>& psupp,
              const QuadSolveCaps& caps, std::vector<Poly>& out,
              bool& truncated) {
    const int32_t qdeg = std::max<int32_t>(field_maxdeg(x) - 1, 0);
    const auto qsupp = monomials_up_to_degree(qdeg);
    const uint32_t np = static_cast<uint32_t>(psupp.size());
    const uint32_t total = np + static_cast<uint32_t>(qsupp.size());
    if (total > kMucUnknownCap) {
        truncated = true;
        return;
    }
    const AnsatzPoly p = ansatz_linear(psupp, 0);
    const AnsatzPoly q = ansatz_linear(qsupp, np);
    AnsatzPoly identity = apply_field_ansatz(x, p);
    ansatz_sub(identity, ansatz_mul(q, p));
    const std::vector<QuadForm> eqs = ansatz_equations(identity);
    uint64_t sweep_work = 0;
    std::set<std::string> seen_q;
    // With a cofactor fixed, X(p) = q*p is linear in p; emit the whole
    // kernel so positive-dimensional families are not collapsed to their
    // canonical representative.
    auto expand_cofactor = [&](const Poly& qv) {
        if (!seen_q.insert(format_expression(qv)).second) return;
        AnsatzPoly lin = apply_field_ansatz(x, p);
        ansatz_sub(lin, ansatz_mul_poly(p, qv));
        const auto sol = solve_affine_equations(ansatz_equations(lin), np);
        if (!sol) return;
        for (const auto& vec : sol->basis) {
            Poly cand = ansatz_instantiate(p, vec);
            if (!cand.is_zero() && !cand.is_constant()) out.push_back(cand);
        }
    };
    for (uint32_t pivot = 0; pivot < np; ++pivot) {
        if (sweep_work > caps.sweep_work_budget) {
            truncated = true;
            break;
        }
        PolySystem sys;
        sys.num_unknowns = total;
        sys.equations = eqs;
        for (auto& e : sys.equations) {
            for (uint32_t u = 0; u < pivot; ++u) e.substitute_const(u, 0);
            e.substitute_const(pivot, 1);
        }
        QuadSolveResult res = solve_quadratic_bounded(sys, caps);
        truncated = truncated || res.budget_exceeded;
        sweep_work += res.work_used;
        for (auto pt : res.solutions) {
            pt[pivot] = 1;
            Poly cand = ansatz_instantiate(p, pt);
            if (!cand.is_zero() && !cand.is_constant()) out.push_back(cand);
            Poly qv;
            for (size_t k = 0; k < qsupp.size(); ++k)
                qv.set(qsupp[k], pt[np + k]);
            expand_cofactor(qv);
        }
    }
}

std::string poly_key(const Poly& p) { return format_expression(p); }

void sort_pairs(std::vector<DarbouxPair>& pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const DarbouxPair& a, const DarbouxPair& b) {
                  if (a.p.degree() != b.p.degree())
                      return a.p.degree() < b.p.degree();
                  return poly_key(a.p) < poly_key(b.p);
              });
}

}  // namespace

std::optional<Poly> cofactor_of(const VField& x, const Poly& p) {
    if (p.is_zero() || p.is_constant()) return std::nullopt;
    return try_exact_div(apply_field(x, p), p);
}

std::vector<DarbouxPair> find_dps(const VField& x, int32_t deg_main,
                                  int32_t deg_param, int field_index,
                                  const QuadSolveCaps& caps) {
    if (deg_param < 0) {
        const auto pv = param_var(x);
        deg_param = pv ? coeff_degree_in(x, *pv) : 0;
    }
    const auto support = plane_support(x, deg_main, deg_param);
    std::vector<Poly> cands;
    bool truncated = false;
    kernel_pass(x, support, cands);
    harvest_pass(x, cands);
    muc_pass(x, support, caps, cands, truncated);

    std::vector<DarbouxPair> pairs;
    std::set<std::string> seen;
    auto admit = [&](const Poly& raw) {
        if (raw.is_zero() || raw.is_constant()) return;
        const Poly p = raw.primitive_part();
        if (!seen.insert(poly_key(p)).second) return;
        if (auto q = cofactor_of(x, p))
            pairs.push_back({p, {{field_index, *q}}});
    };
    for (const Poly& c : cands) admit(c);

    // Replace composites by their certified divisors where visible.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < pairs.size() && !changed; ++i)
            for (size_t j = 0; j < pairs.size() && !changed; ++j) {
                if (i == j) continue;
                auto quot = try_exact_div(pairs[i].p, pairs[j].p);
                if (!quot || quot->is_constant()) continue;
                pairs.erase(pairs.begin() + static_cast<long>(i));
                admit(*quot);
                changed = true;
            }
    }
    sort_pairs(pairs);
    if (pairs.empty() && truncated) throw BudgetExceeded();
    return pairs;
}

std::vector<DarbouxPair> find_triple_dps(const STriple& t, int32_t deg_main,
                                         int32_t deg_param,
                                         const QuadSolveCaps& caps) {
    const VField* fields[3] = {&t.x1, &t.x2, &t.x3};
    std::vector<Poly> cands;
    for (int i = 0; i < 3; ++i) {
        try {
            for (auto& pr : find_dps(*fields[i], deg_main, deg_param, i + 1, caps))
                cands.push_back(pr.p);
        } catch (const BudgetExceeded&) {
            // partial results from the other fields are still useful
        }
    }
    std::vector<DarbouxPair> pairs;
    std::set<std::string> seen;
    auto admit = [&](const Poly& raw) {
        if (raw.is_zero() || raw.is_constant()) return false;
        const Poly p = raw.primitive_part();
        if (!seen.insert(poly_key(p)).second) return false;
        DarbouxPair pr;
        pr.p = p;
        for (int i = 0; i < 3; ++i) {
            auto q = cofactor_of(*fields[i], p);
            if (!q) return false;
            pr.cofactors[i + 1] = *q;
        }
        pairs.push_back(std::move(pr));
        return true;
    };
    for (const Poly& c : cands) admit(c);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < pairs.size() && !changed; ++i)
            for (size_t j = 0; j < pairs.size() && !changed; ++j) {
                if (i == j) continue;
                auto quot = try_exact_div(pairs[i].p, pairs[j].p);
                if (!quot || quot->is_constant()) continue;
                const Poly comp = pairs[i].p;
                pairs.erase(pairs.begin() + static_cast<long>(i));
                admit(*quot);
                changed = true;
            }
    }
    sort_pairs(pairs);
    return pairs;
}

namespace {

// Shared assembly for the exponential/balance linear systems. Unknown
// layout: [a coefficients | n_j | u_1 | u_2 | u_3] (blocks may be empty).
struct BalanceLayout {
    std::vector<Monomial> a_supp;
    size_t num_dps = 0;
    std::vector<Monomial> u_supp[3];
    uint32_t a_off = 0, n_off = 0, u_off[3] = {0, 0, 0};
    uint32_t total = 0;
};

BalanceLayout make_layout(const STriple& t, int32_t deg_a, size_t num_dps,
                          int32_t deg_q0) {
    BalanceLayout ly;
    if (deg_a >= 0) ly.a_supp = monomials_up_to_degree(deg_a);
    ly.num_dps = num_dps;
    const VField* fields[3] = {&t.x1, &t.x2, &t.x3};
    uint32_t off = static_cast<uint32_t>(ly.a_supp.size());
    ly.n_off = off;
    off += static_cast<uint32_t>(num_dps);
    for (int i = 0; i < 3; ++i) {
        const int32_t d =
            deg_q0 >= 0 ? deg_q0 : std::max<int32_t>(field_maxdeg(*fields[i]) - 1, 0);
        ly.u_supp[i] = monomials_up_to_degree(d);
        ly.u_off[i] = off;
        off += static_cast<uint32_t>(ly.u_supp[i].size());
    }
    ly.total = off;
    return ly;
}

// Equations for field i. With unknown a (joint mode):
//   b X_i(a) - a X_i(b) + b^2 (sum_j n_j q_ij + u_i + div_i + pi_i) = 0,
// where pi_i is a fixed polynomial offset (zero in joint mode since a is
// the unknown; the given exponential part in fixed mode, with b ignored).
void field_equations(const STriple& t, const std::vector<DarbouxPair>& dps,
                     const BalanceLayout& ly, const Poly& b, bool joint,
                     const Poly& fixed_pi, int i,
                     std::vector<QuadForm>& out) {
    const VField* fields[3] = {&t.x1, &t.x2, &t.x3};
    const VField& x = *fields[i];
    AnsatzPoly sum = ansatz_linear(ly.u_supp[i], ly.u_off[i]);
    for (size_t j = 0; j < dps.size(); ++j) {
        const Poly& q = dps[j].cofactors.at(i + 1);
        AnsatzPoly nq;
        for (const auto& [m, c] : q.terms()) {
            QuadForm f = QuadForm::unknown(ly.n_off + static_cast<uint32_t>(j));
            f.mul_scalar(c);
            nq.emplace(m, std::move(f));
        }
        ansatz_add(sum, nq);
    }
    ansatz_add(sum, ansatz_from_poly(divergence(x) + fixed_pi));
    AnsatzPoly eq;
    if (joint) {
        const AnsatzPoly a = ansatz_linear(ly.a_supp, ly.a_off);
        eq = ansatz_mul_poly(apply_field_ansatz(x, a), b);
        ansatz_sub(eq, ansatz_mul_poly(a, apply_field(x, b)));
        ansatz_add(eq, ansatz_mul_poly(sum, b * b));
    } else {
        eq = std::move(sum);
    }
    for (QuadForm& f : ansatz_equations(eq)) out.push_back(std::move(f));
}

// Candidate points from an affine solution space. `primary` coordinates
// (the exponential numerator block) are zeroed greedily first; then the
// `secondary` set (the extra-cofactor blocks) drives the enumeration: the
// all-zero point when reachable, the points on a one-dimensional residual
// family where individual secondary coordinates vanish (ranked by how many
// vanish at once), the greedy point, and the canonical particular point.
std::vector<std::vector<Rational>> candidate_points(
    const AffineSolution& sol, const std::vector<uint32_t>& primary,
    const std::vector<uint32_t>& secondary, size_t cap) {
    std::vector<std::vector<Rational>> pts;
    std::set<std::vector<Rational>> seen;
    auto push = [&](std::vector<Rational> p) {
        if (pts.size() < cap && seen.insert(p).second) pts.push_back(std::move(p));
    };
    AffineSpace base(sol);
    for (uint32_t c : primary) base.constrain_zero(c);
    // All secondary coordinates zero, when jointly reachable.
    {
        AffineSpace space = base;
        bool all = true;
        for (uint32_t c : secondary)
            if (!space.constrain_zero(c)) {
                all = false;
                break;
            }
        if (all) push(space.point());
    }
    // One remaining degree of freedom: rank the single-coordinate roots.
    if (base.dimension() == 1) {
        std::map<std::vector<Rational>, size_t> root_count;
        for (uint32_t c : secondary) {
            auto root = base.root_point(c);
            if (root) ++root_count[*root];
        }
        std::vector<std::pair<std::vector<Rational>, size_t>> ranked(
            root_count.begin(), root_count.end());
        std::stable_sort(
            ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
        for (auto& r : ranked) push(r.first);
    }
    {
        AffineSpace greedy = base;
        for (uint32_t c : secondary) greedy.constrain_zero(c);
        push(greedy.point());
    }
    push(base.point());
    push(AffineSpace(sol).point());
    return pts;
}

Poly instantiate_block(const std::vector<Monomial>& supp, uint32_t off,
                       const std::vector<Rational>& pt) {
    Poly p;
    for (size_t k = 0; k < supp.size(); ++k) p.set(supp[k], pt[off + k]);
    return p;
}

ExpPart make_exp_part(const STriple& t, const Poly& a_raw, const Poly& b_raw) {
    ExpPart ep;
    if (a_raw.is_zero()) {
        ep.a = Poly();
        ep.b = Poly(1);
        for (int i = 1; i <= 3; ++i) ep.pi[i] = Poly();
        return ep;
    }
    const RatFn red(a_raw, b_raw);
    ep.a = red.num();
    ep.b = red.den();
    const VField* fields[3] = {&t.x1, &t.x2, &t.x3};
    for (int i = 0; i < 3; ++i) {
        const Poly numer = ep.b * apply_field(*fields[i], ep.a) -
                           ep.a * apply_field(*fields[i], ep.b);
        ep.pi[i + 1] = exact_div(numer, ep.b * ep.b);
    }
    return ep;
}

}  // namespace

std::optional<ExpPart> solve_exp_part(const STriple& t, const Poly& b,
                                      int32_t deg_a) {
    if (b.is_zero()) throw DivisionByZero();
    if (b.is_constant()) {
        ExpPart ep;
        for (int i = 1; i <= 3; ++i) ep.pi[i] = Poly();
        return ep;
    }
    const VField* fields[3] = {&t.x1, &t.x2, &t.x3};
    const auto a_supp = monomials_up_to_degree(deg_a);
    const uint32_t na = static_cast<uint32_t>(a_supp.size());
    std::vector<Monomial> pi_supp[3];
    uint32_t off = na, pi_off[3];
    for (int i = 0; i < 3; ++i) {
        const int32_t d = field_maxdeg(*fields[i]) + deg_a - b.degree() - 1;
        pi_supp[i] = monomials_up_to_degree(std::max<int32_t>(d, 0));
        pi_off[i] = off;
        off += static_cast<uint32_t>(pi_supp[i].size());
    }
    const AnsatzPoly a = ansatz_linear(a_supp, 0);
    std::vector<QuadForm> eqs;
    for (int i = 0; i < 3; ++i) {
        AnsatzPoly eq = ansatz_mul_poly(apply_field_ansatz(*fields[i], a), b);
        ansatz_sub(eq, ansatz_mul_poly(a, apply_field(*fields[i], b)));
        ansatz_sub(eq, ansatz_mul_poly(ansatz_linear(pi_supp[i], pi_off[i]), b * b));
        for (QuadForm& f : ansatz_equations(eq)) eqs.push_back(std::move(f));
    }
    const auto sol = solve_affine_equations(eqs, off);
    if (!sol) return std::nullopt;
    for (const auto& vec : sol->basis) {
        Poly av = instantiate_block(a_supp, 0, vec);
        if (av.is_zero()) continue;
        if (!gcd_poly(av, b).is_constant()) continue;
        return make_exp_part(t, av, b);
    }
    return std::nullopt;
}

std::vector<JointBalance> joint_balance_candidates(
    const STriple& t, const std::vector<DarbouxPair>& dps, const Poly& b,
    int32_t deg_a, int32_t deg_q0, size_t cap) {
    const BalanceLayout ly = make_layout(t, deg_a, dps.size(), deg_q0);
    std::vector<QuadForm> eqs;
    for (int i = 0; i < 3; ++i)
        field_equations(t, dps, ly, b, true, Poly(), i, eqs);
    const auto sol = solve_affine_equations(eqs, ly.total);
    if (!sol) return {};
    std::vector<uint32_t> primary, secondary;
    for (uint32_t c = 0; c < ly.a_supp.size(); ++c) primary.push_back(c);
    for (int i = 0; i < 3; ++i)
        for (uint32_t k = 0; k < ly.u_supp[i].size(); ++k)
            secondary.push_back(ly.u_off[i] + k);
    std::vector<JointBalance> out;
    for (const auto& pt : candidate_points(*sol, primary, secondary, cap)) {
        JointBalance jb;
        jb.exp = make_exp_part(t, instantiate_block(ly.a_supp, ly.a_off, pt), b);
        for (size_t j = 0; j < dps.size(); ++j)
            jb.balance.exponents[j] = pt[ly.n_off + j];
        for (int i = 0; i < 3; ++i)
            jb.balance.n0q0[i + 1] = instantiate_block(ly.u_supp[i], ly.u_off[i], pt);
        out.push_back(std::move(jb));
    }
    return out;
}

std::vector<CofactorBalance> balance_candidates(
    const STriple& t, const std::vector<DarbouxPair>& dps, const ExpPart& exp,
    int32_t deg_q0, size_t cap) {
    const BalanceLayout ly = make_layout(t, -1, dps.size(), deg_q0);
    std::vector<QuadForm> eqs;
    for (int i = 0; i < 3; ++i) {
        const auto it = exp.pi.find(i + 1);
        field_equations(t, dps, ly, Poly(1), false,
                        it == exp.pi.end() ? Poly() : it->second, i, eqs);
    }
    const auto sol = solve_affine_equations(eqs, ly.total);
    if (!sol) return {};
    std::vector<uint32_t> secondary;
    for (int i = 0; i < 3; ++i)
        for (uint32_t k = 0; k < ly.u_supp[i].size(); ++k)
            secondary.push_back(ly.u_off[i] + k);
    std::vector<CofactorBalance> out;
    for (const auto& pt : candidate_points(*sol, {}, secondary, cap)) {
        CofactorBalance cb;
        for (size_t j = 0; j < dps.size(); ++j)
            cb.exponents[j] = pt[ly.n_off + j];
        for (int i = 0; i < 3; ++i)
            cb.n0q0[i + 1] = instantiate_block(ly.u_supp[i], ly.u_off[i], pt);
        out.push_back(std::move(cb));
    }
    return out;
}

std::optional<CofactorBalance> balance_cofactors(
    const STriple& t, const std::vector<DarbouxPair>& dps, const ExpPart& exp,
    int32_t deg_q0) {
    auto cands = balance_candidates(t, dps, exp, deg_q0, 1);
    if (cands.empty()) return std::nullopt;
    return std::move(cands.front());
}

// ---- linear recovery of the unknown factor ---------------------------------

namespace {

// Action of X(p) - q*p on a single monomial mu, organized by lattice shift:
// the coefficient at monomial mu*sigma is wx*ex + wy*ey + wz*ez - q,
// an affine function of mu's exponents.
struct ShiftRec {
    Rational wx, wy, wz, q;
};

using ShiftMap = std::map<Monomial, ShiftRec, GlexGreater>;

ShiftMap make_shifts(const VField& x, const Poly& q) {
    ShiftMap s;
    for (const auto& [m, c] : x.fx.terms()) s[m / kX].wx += c;
    for (const auto& [m, c] : x.fy.terms()) s[m / kY].wy += c;
    for (const auto& [m, c] : x.fz.terms()) s[m / kZ].wz += c;
    for (const auto& [m, c] : q.terms()) s[m].q += c;
    return s;
}

Rational shift_coeff(const ShiftRec& r, const Monomial& mu) {
    return r.wx * mu.ex + r.wy * mu.ey + r.wz * mu.ez - r.q;
}

constexpr uint32_t kThetaCap = 96;
constexpr size_t kFamilyCap = 40;

// Solve X(p) = q*p over the total-degree-<= d box by descending-glex
// elimination: each candidate monomial is resolved from the identity's
// coefficient at its highest reachable monomial; positions whose leading
// coefficients all vanish become free parameters, and repeated equations
// become constraints on those parameters. Returns a spanning family of the
// subsystem's kernel (a superset of the true solution space; the caller
// refines it against the full identity).
std::vector<Poly> sweep_family(const VField& x, const Poly& q, int32_t d) {
    const ShiftMap shifts = make_shifts(x, q);
    std::map<Monomial, QuadForm, GlexGreater> p_expr;
    uint32_t num_theta = 0;
    std::vector<QuadForm> constraints;
    auto expr_of = [&](const Monomial& mu) -> const QuadForm& {
        auto it = p_expr.find(mu);
        if (it == p_expr.end()) {
            if (num_theta >= kThetaCap) throw BudgetExceeded();
            it = p_expr.emplace(mu, QuadForm::unknown(num_theta++)).first;
        }
        return it->second;
    };
    try {
        for (const Monomial& mu : monomials_up_to_degree(d)) {
            const bool preassigned = p_expr.count(mu) != 0;
            const ShiftMap::const_iterator star = [&] {
                for (auto it = shifts.begin(); it != shifts.end(); ++it)
                    if (!is_zero(shift_coeff(it->second, mu))) return it;
                return shifts.end();
            }();
            if (star == shifts.end()) {
                if (!preassigned) expr_of(mu);
                continue;
            }
            const Monomial nu = mu * star->first;
            QuadForm eq;
            Rational self_coeff(0);
            for (const auto& [sigma, rec] : shifts) {
                const Monomial mup = nu / sigma;
                if (!mup.nonnegative() || mup.degree() > d) continue;
                const Rational c = shift_coeff(rec, mup);
                if (is_zero(c)) continue;
                if (mup == mu && !preassigned) {
                    self_coeff += c;
                    continue;
                }
                QuadForm term(expr_of(mup));
                term.mul_scalar(c);
                eq += term;
            }
            if (preassigned) {
                constraints.push_back(std::move(eq));
            } else {
                eq.mul_scalar(Rational(-1) / self_coeff);
                p_expr[mu] = std::move(eq);
            }
        }
    } catch (const BudgetExceeded&) {
        return {};
    }
    std::vector<Poly> family;
    if (num_theta == 0) return family;  // only the zero solution
    const auto sol = solve_affine_equations(constraints, num_theta);
    if (!sol) return family;
    for (const auto& vec : sol->basis) {
        if (family.size() >= kFamilyCap) return {};  // too wide to refine
        Poly member;
        for (const auto& [m, f] : p_expr) member.set(m, f.evaluate(vec));
        if (!member.is_zero()) family.push_back(std::move(member));
    }
    return family;
}

}  // namespace

const std::vector<Rational>& default_n0_trials() {
    static const std::vector<Rational> trials = {
        Rational(1),  Rational(-1), Rational(2),          Rational(-2),
        Rational(1) / 2, Rational(-1) / 2, Rational(3),   Rational(-3),
        Rational(4),  Rational(-4)};
    return trials;
}

std::optional<RecoveredDp> recover_dp(const STriple& t,
                                      const CofactorBalance& bal,
                                      int32_t deg_cap,
                                      const std::vector<Rational>& n0_trials,
                                      const std::vector<int>& fields) {
    const VField* all[3] = {&t.x1, &t.x2, &t.x3};
    std::vector<int> fs = fields.empty() ? std::vector<int>{1, 2, 3} : fields;
    auto u_of = [&](int i) -> Poly {
        const auto it = bal.n0q0.find(i);
        return it == bal.n0q0.end() ? Poly() : it->second;
    };
    bool any_nonzero = false;
    for (int i : fs) any_nonzero = any_nonzero || !u_of(i).is_zero();
    if (!any_nonzero) return std::nullopt;

    // Drive the recurrence with one field (preferring the second, the
    // cheapest in practice), refine and certify against all requested ones.
    int drive = 0;
    for (int i : {2, 3, 1}) {
        if (std::find(fs.begin(), fs.end(), i) == fs.end()) continue;
        if (!field_is_zero(*all[i - 1])) {
            drive = i;
            break;
        }
    }
    if (drive == 0) return std::nullopt;

    std::vector<int32_t> ladder;
    for (int32_t d : {2, 4, 8, 16, 32})
        if (d < deg_cap) ladder.push_back(d);
    if (deg_cap >= 1) ladder.push_back(deg_cap);

    for (int32_t d : ladder) {
        for (const Rational& n0 : n0_trials) {
            if (is_zero(n0)) continue;
            const Rational inv = Rational(1) / n0;
            auto q_of = [&](int i) {
                Poly qi = u_of(i);
                qi.mul_scalar(inv);
                return qi;
            };
            std::vector<Poly> family = sweep_family(*all[drive - 1], q_of(drive), d);
            if (family.empty()) continue;
            // Impose the full identities on the family span.
            std::vector<QuadForm> eqs;
            std::vector<std::map<Monomial, QuadForm, GlexGreater>> stacked;
            for (int i : fs) {
                const Poly qi = q_of(i);
                std::map<Monomial, QuadForm, GlexGreater> resid;
                for (size_t j = 0; j < family.size(); ++j) {
                    const Poly rj =
                        apply_field(*all[i - 1], family[j]) - qi * family[j];
                    for (const auto& [m, c] : rj.terms()) {
                        QuadForm f = QuadForm::unknown(static_cast<uint32_t>(j));
                        f.mul_scalar(c);
                        auto it = resid.find(m);
                        if (it == resid.end())
                            resid.emplace(m, std::move(f));
                        else
                            it->second += f;
                    }
                }
                for (auto& [m, f] : resid)
                    if (!f.is_zero()) eqs.push_back(std::move(f));
            }
            const auto sol =
                solve_affine_equations(eqs, static_cast<uint32_t>(family.size()));
            if (!sol) continue;
            for (const auto& vec : sol->basis) {
                Poly cand;
                for (size_t j = 0; j < family.size(); ++j) {
                    Poly term = family[j];
                    term.mul_scalar(vec[j]);
                    cand += term;
                }
                if (cand.is_zero() || cand.is_constant()) continue;
                cand = cand.primitive_part();
                bool ok = true;
                for (int i : fs) {
                    if (apply_field(*all[i - 1], cand) != q_of(i) * cand) {
                        ok = false;
                        break;
                    }
                }
                if (ok) return RecoveredDp{cand, n0};
            }
        }
    }
    return std::nullopt;
}

}  // namespace lfint

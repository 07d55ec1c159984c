#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "lfint/linsolve.hpp"
#include "lfint/poly.hpp"

namespace lfint {

// Polynomial of total degree <= 2 in a block of unknowns u_0..u_{n-1} with
// rational coefficients: c + sum lin[i]*u_i + sum quad[{i,j}]*u_i*u_j (i<=j).
class QuadForm {
  public:
    Rational c;
    std::map<uint32_t, Rational> lin;
    std::map<std::pair<uint32_t, uint32_t>, Rational> quad;

    QuadForm() : c(0) {}
    QuadForm(const Rational& k) : c(k) {}
    static QuadForm unknown(uint32_t i);

    bool is_constant() const { return lin.empty() && quad.empty(); }
    bool is_zero() const { return is_constant() && lfint::is_zero(c); }
    bool is_affine() const { return quad.empty(); }
    int degree() const { return quad.empty() ? (lin.empty() ? 0 : 1) : 2; }

    void add_lin(uint32_t i, const Rational& v);
    void add_quad(uint32_t i, uint32_t j, const Rational& v);

    QuadForm operator-() const;
    QuadForm& operator+=(const QuadForm& o);
    QuadForm& operator-=(const QuadForm& o);
    friend QuadForm operator+(QuadForm a, const QuadForm& b) { return a += b; }
    friend QuadForm operator-(QuadForm a, const QuadForm& b) { return a -= b; }
    // Product; throws std::logic_error if the result would exceed degree 2.
    friend QuadForm operator*(const QuadForm& a, const QuadForm& b);
    QuadForm& mul_scalar(const Rational& k);
    friend bool operator==(const QuadForm&, const QuadForm&) = default;

    // Replace unknown u by the affine form `val` (degree <= 1). Safe for any
    // occurrence pattern since affine substitution preserves degree <= 2.
    void substitute_affine(uint32_t u, const QuadForm& val);
    // Replace unknown u by a constant.
    void substitute_const(uint32_t u, const Rational& v);
    // Batch constant substitution; returns true if anything changed.
    bool substitute_consts(const std::map<uint32_t, Rational>& vals);
    // Remove every occurrence of u (substitute 0); returns true if changed.
    bool zero_out(uint32_t u);
    size_t entry_count() const { return 1 + lin.size() + quad.size(); }

    // Divide by gcd of coefficients (sign-normalized); no-op on zero.
    void strip_content();

    Rational evaluate(const std::vector<Rational>& point) const;
    // All unknowns appearing in the form.
    std::vector<uint32_t> unknowns() const;
};

struct PolySystem {
    uint32_t num_unknowns = 0;
    std::vector<QuadForm> equations;
};

struct QuadSolveCaps {
    int branch_width = 64;   // max frontier size
    int depth = 12;          // max branch decisions along one path
    uint64_t node_budget = 8192;  // total propagation states expanded
    // Total coefficient-entry touches across one search; a deterministic
    // stand-in for wall time.
    uint64_t work_budget = 50'000'000;
    // Cumulative work across a whole chart sweep (many searches); once
    // spent, remaining charts are skipped and the sweep reports truncation.
    uint64_t sweep_work_budget = 120'000'000;
    // Stop searching once this many solutions were found (0 = exhaust the
    // tree). An early stop is reported as budget_exceeded.
    uint32_t max_solutions = 0;
};

struct QuadSolveResult {
    // Canonical representative points, deduplicated, deterministic order.
    // Positive-dimensional solution families are represented by their
    // canonical member (remaining free unknowns set to 0).
    std::vector<std::vector<Rational>> solutions;
    bool budget_exceeded = false;  // caps hit or no rule applied somewhere
    uint64_t work_used = 0;        // deterministic work units consumed
};

// Deterministic branch-and-propagate search for rational solutions of a
// degree <= 2 system. Exhaustive up to the caps and the representative-point
// convention; every returned point satisfies the system exactly (verified).
QuadSolveResult solve_quadratic_bounded(const PolySystem& sys,
                                        const QuadSolveCaps& caps = {});

// ---- ansatz assembly -------------------------------------------------------
// Polynomial in (x,y,z) whose coefficients are QuadForms in a block of
// ansatz unknowns; the bridge from undetermined-coefficient candidates to
// PolySystem equations (one per monomial).
using AnsatzPoly = std::map<Monomial, QuadForm, GlexGreater>;

AnsatzPoly ansatz_from_poly(const Poly& p);
// sum_{i} u_{first_unknown+i} * support[i]
AnsatzPoly ansatz_linear(const std::vector<Monomial>& support,
                         uint32_t first_unknown);
void ansatz_add(AnsatzPoly& a, const AnsatzPoly& b);
void ansatz_sub(AnsatzPoly& a, const AnsatzPoly& b);
AnsatzPoly ansatz_mul_poly(const AnsatzPoly& a, const Poly& p);
// Throws std::logic_error if coefficient degrees would exceed 2.
AnsatzPoly ansatz_mul(const AnsatzPoly& a, const AnsatzPoly& b);
AnsatzPoly ansatz_derivative(const AnsatzPoly& a, Var v);
// One equation per monomial (zero coefficients dropped).
std::vector<QuadForm> ansatz_equations(const AnsatzPoly& a);
// Instantiate at a solution point.
Poly ansatz_instantiate(const AnsatzPoly& a, const std::vector<Rational>& pt);

// Monomial boxes for candidate supports.
std::vector<Monomial> monomials_up_to_degree(int32_t d);

}  // namespace lfint

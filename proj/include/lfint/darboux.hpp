#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lfint/sfunction.hpp"

namespace lfint {

// A polynomial p with X_i(p) = q_i * p for every stored field index i.
struct DarbouxPair {
    Poly p;                        // primitive, positive leading coefficient
    std::map<int, Poly> cofactors; // field index (1..3) -> cofactor
};

// Exponential part e^{a/b} of an integrating factor, together with the
// polynomials pi_i defined by b*X_i(a) - a*X_i(b) = b^2 * pi_i.
struct ExpPart {
    Poly a;
    Poly b = Poly(1);
    std::map<int, Poly> pi;
};

// Solution of the per-field balance pi_i + sum_j n_j q_ij + u_i + div_i = 0,
// where u_i is the product of the unknown factor's exponent and cofactor.
struct CofactorBalance {
    std::map<size_t, Rational> exponents; // index into the DP list -> n_j
    std::map<int, Poly> n0q0;             // field index -> u_i
};

struct JointBalance {
    ExpPart exp;
    CofactorBalance balance;
};

struct RecoveredDp {
    Poly p0;
    Rational n0;
};

// Exact cofactor X(p)/p, or nullopt when p does not divide X(p).
std::optional<Poly> cofactor_of(const VField& x, const Poly& p);

// Degree-bounded search for Darboux polynomials of one field. Candidates
// have degree <= deg_main in the field's active variables and <= deg_param
// in its parameter variable (the variable whose derivative component is
// zero); deg_param = -1 selects the coefficient degree in that variable.
// Combines a kernel pass (cofactor 0, linear), a divisor-harvest pass over
// the field's coefficients, and an undetermined-coefficient pass solved by
// the bounded quadratic solver. Results are primitive, pairwise
// non-associate, certified, ordered by (degree, canonical string); the
// cofactor is stored under field_index. Throws BudgetExceeded only when the
// search was truncated and produced nothing.
std::vector<DarbouxPair> find_dps(const VField& x, int32_t deg_main,
                                  int32_t deg_param = -1, int field_index = 1,
                                  const QuadSolveCaps& caps = {});

// Runs find_dps on all three plane fields of a triple, keeps candidates
// that carry an exact cofactor for every field, fills the full cofactor
// maps, and replaces composite candidates by their certified divisors.
std::vector<DarbouxPair> find_triple_dps(const STriple& t, int32_t deg_main,
                                         int32_t deg_param = -1,
                                         const QuadSolveCaps& caps = {});

// For a fixed denominator candidate b, solves the stacked linear system
// b*X_i(a) - a*X_i(b) = b^2 * pi_i over all three fields for a (total
// degree <= deg_a) and the pi_i. The solution space always contains
// (a, pi) = 0; for constant b that trivial representative is returned,
// otherwise the first kernel member with gcd(a, b) = 1 (so the stored pair
// is reduced). Returns nullopt when no such member exists.
std::optional<ExpPart> solve_exp_part(const STriple& t, const Poly& b,
                                      int32_t deg_a);

// Solves pi_i + sum_j n_j q_ij + u_i + div(X_i) = 0 for the exponents n_j
// and the coefficient blocks u_i (total degree <= deg_q0; -1 selects
// maxdeg(field coefficients) - 1 per field). Returns candidate solutions
// ordered by increasing number of nonzero u coefficients (canonical
// tie-break), at most `cap` of them; empty when the system is inconsistent.
std::vector<CofactorBalance> balance_candidates(
    const STriple& t, const std::vector<DarbouxPair>& dps, const ExpPart& exp,
    int32_t deg_q0 = -1, size_t cap = 16);

// First candidate of balance_candidates, the support-minimal point.
std::optional<CofactorBalance> balance_cofactors(
    const STriple& t, const std::vector<DarbouxPair>& dps, const ExpPart& exp,
    int32_t deg_q0 = -1);

// Joint variant used by the pipeline: a is unknown (degree <= deg_a)
// alongside the n_j and u_i, eliminating the need to fix the exponential
// part in advance: b*X_i(a) - a*X_i(b) + b^2 (sum_j n_j q_ij + u_i + div_i)
// = 0. Candidate points are enumerated exactly like balance_candidates,
// preferring zero a and small u support.
std::vector<JointBalance> joint_balance_candidates(
    const STriple& t, const std::vector<DarbouxPair>& dps, const Poly& b,
    int32_t deg_a, int32_t deg_q0 = -1, size_t cap = 16);

// Recovers the unknown factor linearly from its cofactor products: for each
// trial n0, divides u_i by n0 and solves the stacked linear systems
// X_i(p0) = (u_i/n0) p0 by a leading-term recurrence over a total-degree
// box, escalating the degree up to deg_cap. Fields restricts which plane
// fields are stacked (empty = all three). Returns the first nontrivial
// primitive solution in (degree, trial) order, certified exactly.
const std::vector<Rational>& default_n0_trials();

std::optional<RecoveredDp> recover_dp(
    const STriple& t, const CofactorBalance& bal, int32_t deg_cap,
    const std::vector<Rational>& n0_trials = default_n0_trials(),
    const std::vector<int>& fields = {});

}  // namespace lfint

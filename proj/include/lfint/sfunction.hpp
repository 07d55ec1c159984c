#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lfint/expr.hpp"
#include "lfint/quadsolve.hpp"
#include "lfint/ratfn.hpp"

namespace lfint {

struct DegenerateEquation : std::runtime_error {
    DegenerateEquation()
        : std::runtime_error("defining equation degenerates for this input") {}
};

struct DegenerateTriple : std::runtime_error {
    DegenerateTriple()
        : std::runtime_error("gradient triple degenerates for this input") {}
};

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded() : std::runtime_error("search budget exceeded") {}
};

// Polynomial vector field f_x ∂x + f_y ∂y + f_z ∂z.
struct VField {
    Poly fx, fy, fz;
};

Poly apply_field(const VField& v, const Poly& p);
RatFn apply_field(const VField& v, const RatFn& f);
Poly divergence(const VField& v);

// The three-variable field carrying a second-order equation z' = m0/n0:
// n0 ∂x + z n0 ∂y + m0 ∂z.
VField associated_field(const Ode2& ode);

// Total derivative along solutions: f_x + z f_y + (m0/n0) f_z.
RatFn dx_total(const Ode2& ode, const RatFn& f);

// Gradient-ratio triple (q, p, n) proportional to (I_x, I_y, I_z) for a
// first integral I, together with the three ratios s1 = p/n, s2 = q/n,
// s3 = q/p and the plane fields x1, x2, x3 each annihilating I.
struct STriple {
    Poly q, p, n;
    RatFn s1, s2, s3;
    VField x1, x2, x3;
};

// Left-minus-right of the k-th defining equation for the ratio s_k; the
// result is identically zero exactly when s satisfies it.
//   k=1: D(s) = s^2 + phi_z s - phi_y
//   k=2: D(s) = -s^2/z + (phi_z - phi/z) s - phi_x
//   k=3: D(s) = (-phi_y s^2 + (phi_x - z phi_y) s + z phi_x) / phi
// with D = dx_total. Throws DegenerateEquation when a divisor (z for k=2,
// phi for k=3) is identically zero.
RatFn spde_residual(const Ode2& ode, const RatFn& s, int k);

struct DegreeBounds {
    int32_t num = 1;
    int32_t den = 1;
};

// All rational s = a/b with deg a <= bounds.num, deg b <= bounds.den and
// spde_residual(ode, s, k) == 0, via undetermined coefficients on the
// denominator-cleared equation. Every candidate is certified before being
// returned; results are deduplicated and ordered by (deg a + deg b,
// canonical string). Throws BudgetExceeded when the search was truncated
// and produced nothing. With max_candidates > 0 the chart sweep stops as
// soon as that many certified candidates exist (the cheap way to ask for
// "one usable s" rather than the full list). When work_used is non-null it
// receives the solver work consumed by the sweep (set even on throw), so a
// caller can meter several calls against one deterministic budget.
std::vector<RatFn> find_sfunction(const Ode2& ode, int k, DegreeBounds bounds,
                                  const QuadSolveCaps& caps = {},
                                  int max_candidates = 0,
                                  uint64_t* work_used = nullptr);

// Clear s_k = a/b into a polynomial triple using the linear relation
// n0 q + z n0 p + m0 n = 0, reduce by the common gcd and fix the sign so
// that the first nonzero component of (n, p, q) has a positive leading
// coefficient. Throws DegenerateTriple when n or p collapses to zero
// (they are denominators of the stored ratios); q = 0 is legitimate.
STriple build_triple(const Ode2& ode, const RatFn& s, int k);

// Informational rendering of the plane equation determined by s_k:
// k=3 -> dy/dx, k=2 -> dz/dx, k=1 -> dz/dy, remaining variable a parameter.
std::string associated_1ode(const RatFn& s, int k);

}  // namespace lfint

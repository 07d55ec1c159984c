#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lfint/darboux.hpp"
#include "lfint/ratfn.hpp"
#include "lfint/sfunction.hpp"

namespace lfint {

// R = e^{a/b} * prod_j p_j^{n_j}, certified against all three plane fields:
// the logarithmic derivative of R under each field cancels its divergence.
struct IntegratingFactor {
    ExpPart exp;
    std::vector<std::pair<Poly, Rational>> factors;
};

struct IdentityFails : std::runtime_error {
    int field;
    Poly residual;
    IdentityFails(int f, Poly r)
        : std::runtime_error("integrating-factor identity fails on field " +
                             std::to_string(f)),
          field(f),
          residual(std::move(r)) {}
};

struct AnsatzExhausted : std::runtime_error {
    AnsatzExhausted()
        : std::runtime_error(
              "no closed form found within the ansatz degree cap") {}
};

enum class Presentation { additive, exponential };

// J = rational_part + sum_k c_k ln(arg_k) + coeff * e^W. The gradient of J
// equals R * (q, p, n) component-wise; equivalently the ODE field kills J.
struct FirstIntegralForm {
    RatFn rational_part;
    std::vector<std::pair<Rational, Poly>> log_terms;
    struct ExpTerm {
        RatFn w;      // exponent
        RatFn coeff;  // multiplier
    };
    std::optional<ExpTerm> exp_term;
    Presentation presentation = Presentation::additive;
};

// Checks the per-field identity pi_i + sum_j n_j q_ij + div(X_i) = 0 for
// each of the triple's plane fields and returns the assembled factor.
// Throws IdentityFails with the offending field index otherwise.
IntegratingFactor assemble_R(const STriple& t, const ExpPart& exp,
                             const std::vector<std::pair<DarbouxPair, Rational>>& factors);

// Linear-ansatz integration of the exact 1-form R*(q dx + p dy + n dz).
// With a trivial exponential part: J = C/D + sum c_k ln(p_k), D running over
// a small per-factor multiplicity ladder, C of total degree <= deg_c. With a
// nontrivial part: J = e^{a/b} * C/D. Throws AnsatzExhausted when no rung
// admits a solution at this degree.
//
// The denominator ladder and log arguments run over a gcd-refined basis of
// the factor polynomials: pairwise-coprime square-free divisors, with the
// exponents re-accumulated. A factor recovered as one reducible block (say
// u * v^2) splits there, which is what lets logs of its parts carry
// independent coefficients. refine_hints supplies extra known divisors
// (e.g. low-degree Darboux polynomials) to sharpen the splitting; hints
// that divide no factor are ignored.
FirstIntegralForm integrate_closed_form(const IntegratingFactor& r,
                                        const STriple& t, int32_t deg_c,
                                        const std::vector<Poly>& refine_hints = {});

// Exact symbolic residual of applying the ODE's total-derivative field to J:
// plain + exp_coeff * e^{exp_arg}. J certifies iff the residual is zero.
struct IntegralResidual {
    RatFn plain;
    RatFn exp_coeff;
    RatFn exp_arg;
    bool is_zero() const { return plain.is_zero() && exp_coeff.is_zero(); }
};

IntegralResidual verify_first_integral(const Ode2& ode,
                                       const FirstIntegralForm& j);

}  // namespace lfint

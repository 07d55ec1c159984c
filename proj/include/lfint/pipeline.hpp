#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfint/darboux.hpp"
#include "lfint/integrate.hpp"
#include "lfint/quadsolve.hpp"
#include "lfint/sfunction.hpp"

namespace lfint {

// Tuning knobs for the end-to-end search. Every cap is positive and the
// degree ladder grows monotonically; run_pipeline validates this and throws
// std::invalid_argument on violation. With stage_time_budget_ms left at 0
// the whole run is deterministic: identical inputs produce identical
// reports apart from the wall-clock timing fields.
struct PipelineConfig {
    // Which ratio channels to try, in order. Channel 3 leads by default:
    // its defining equation tends to have the lowest-degree solutions.
    std::vector<int> s_search_order = {3, 1, 2};
    // Degree bounds (numerator, denominator) tried from the front.
    std::vector<DegreeBounds> s_degree_ladder = {{1, 1}, {2, 2}, {3, 3}, {4, 4}};
    // Certified candidates to collect per (channel, rung) sweep.
    int s_max_candidates = 2;
    // Cumulative solver-work allowance across every ratio sweep of the run.
    // Oversized instances fail fast and deterministically against this.
    uint64_t s_work_budget = 150'000'000;
    // Caps for the bounded quadratic solver (ratio and Darboux searches).
    // For the ratio chart sweeps max_solutions = 0 is promoted to 4 so a
    // sweep never enumerates a solution family exhaustively; the Darboux
    // searches get the caps unchanged.
    QuadSolveCaps quad_caps{};

    // Darboux search bounds: degree in the two active variables of each
    // plane field, and in its parameter variable (-1 = module default,
    // which tracks the coefficient degree and gets expensive; the factors
    // worth finding here are low-degree, so the pipeline caps it).
    int32_t dp_degree_main = 2;
    int32_t dp_degree_param = 2;
    // Solver work allowed per Darboux chart and per field sweep. These sit
    // well below the ratio-search budgets: useful factors here are cheap,
    // and a chart that needs more work than this only ever yields junk.
    uint64_t dp_work_budget = 2'000'000;
    uint64_t dp_sweep_work_budget = 6'000'000;

    // Exponential-part denominators are products of found Darboux
    // polynomials with multiplicity <= 2; at most this many candidates are
    // tried (the constant denominator first).
    int b_subset_cap = 6;
    // Total-degree cap for the exponential-part numerator; -1 selects
    // max(2, deg b) per candidate.
    int32_t deg_a = -1;
    // Degree cap for the unknown cofactor blocks (-1 = module default).
    int32_t deg_q0 = -1;
    // Balance points tried per denominator candidate.
    size_t balance_cap = 8;

    // Trial exponents for the recovered factor and its degree cap.
    std::vector<Rational> n0_trials = default_n0_trials();
    int32_t deg_p0_cap = 48;

    // Integration ansatz: the numerator degree ladder starts at 2 and
    // climbs by 2 up to this cap.
    int32_t deg_c_cap = 40;

    // Optional wall-clock guard per stage in milliseconds; 0 disables it.
    // Enabling it trades the determinism guarantee for bounded latency.
    uint64_t stage_time_budget_ms = 0;
};

// One ratio candidate the run looked at, with the outcome of sending it
// down the rest of the pipe.
struct SCandidate {
    int k = 0;
    RatFn s;
    bool used = false;  // true for the candidate behind a successful run
    std::string note;   // why it was discarded, when it was
};

struct StageTiming {
    std::string stage;
    uint64_t ms = 0;
};

struct PipelineReport {
    Ode2 ode;

    std::vector<SCandidate> s_functions;
    int used_k = 0;
    std::optional<RatFn> used_s;

    std::optional<STriple> triple;
    std::vector<DarbouxPair> dps;
    std::optional<ExpPart> exp_part;
    std::optional<CofactorBalance> balance;
    std::optional<Poly> p0;
    std::optional<Rational> n0;
    std::optional<IntegratingFactor> integrating_factor;
    std::optional<FirstIntegralForm> first_integral;
    std::optional<IntegralResidual> residual;

    std::vector<StageTiming> timings;  // canonical stage order, then total
    bool success = false;
    std::string failure_stage;   // deepest stage reached; empty on success
    std::string failure_reason;  // empty on success
    std::vector<std::string> notes;
};

// Runs the whole method on one equation: find a rational ratio function,
// clear it into a polynomial triple, collect low-degree Darboux polynomials
// of the plane fields, balance cofactors (with the exponential part solved
// jointly), linearly recover the missing factor when the balance calls for
// one, assemble and certify the integrating factor, integrate by linear
// ansatz, and verify the result exactly. Candidates at every level are
// tried in deterministic order until one certifies end to end; failures are
// embedded in the report, never thrown.
PipelineReport run_pipeline(const Ode2& ode, const PipelineConfig& cfg = {});

}  // namespace lfint

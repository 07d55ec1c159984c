#include "lfint/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "lfint/expr.hpp"

namespace lfint {

namespace {

using Clock = std::chrono::steady_clock;

// Stage labels in pipeline order; the index is the progress depth used to
// pick which partial attempt a failure report describes.
enum Stage : int {
    kSFunction = 0,
    kTriple,
    kDps,
    kBalance,
    kRecover,
    kAssemble,
    kIntegrate,
    kVerify,
};

const char* stage_name(int s) {
    static const char* const names[] = {
        "find_sfunction",     "build_triple", "find_dps",
        "balance_cofactors",  "recover_dp",   "assemble_R",
        "integrate_closed_form", "verify_first_integral",
    };
    return names[s];
}

void validate(const PipelineConfig& cfg) {
    auto bad = [](const char* what) {
        throw std::invalid_argument(std::string("pipeline config: ") + what);
    };
    std::set<int> order(cfg.s_search_order.begin(), cfg.s_search_order.end());
    if (cfg.s_search_order.empty() || order.size() != cfg.s_search_order.size())
        bad("search order must be distinct channels");
    for (int k : cfg.s_search_order)
        if (k < 1 || k > 3) bad("search order entries must be in 1..3");
    if (cfg.s_degree_ladder.empty()) bad("degree ladder is empty");
    for (size_t i = 0; i < cfg.s_degree_ladder.size(); ++i) {
        const DegreeBounds& b = cfg.s_degree_ladder[i];
        if (b.num < 0 || b.den < 0 || (b.num == 0 && b.den == 0))
            bad("degree ladder entries must be nonnegative and nontrivial");
        if (i > 0) {
            const DegreeBounds& a = cfg.s_degree_ladder[i - 1];
            if (b.num < a.num || b.den < a.den ||
                (b.num == a.num && b.den == a.den))
                bad("degree ladder must increase monotonically");
        }
    }
    if (cfg.s_max_candidates < 1) bad("s_max_candidates must be positive");
    if (cfg.s_work_budget == 0) bad("s_work_budget must be positive");
    if (cfg.dp_degree_main < 1) bad("dp_degree_main must be positive");
    if (cfg.dp_work_budget == 0 || cfg.dp_sweep_work_budget == 0)
        bad("darboux work budgets must be positive");
    if (cfg.b_subset_cap < 1) bad("b_subset_cap must be positive");
    if (cfg.balance_cap < 1) bad("balance_cap must be positive");
    if (cfg.deg_p0_cap < 1) bad("deg_p0_cap must be positive");
    if (cfg.deg_c_cap < 1) bad("deg_c_cap must be positive");
    if (cfg.n0_trials.empty()) bad("n0_trials is empty");
    for (const Rational& r : cfg.n0_trials)
        if (is_zero(r)) bad("n0_trials entries must be nonzero");
}

// Denominator candidates for the exponential part: products of found
// Darboux polynomials with multiplicity <= 2, the constant one first,
// then by (total multiplicity, degree, multiplicity vector).
std::vector<Poly> b_candidates(const std::vector<DarbouxPair>& dps,
                               int cap) {
    struct Cand {
        int tot;
        int32_t deg;
        std::vector<int> m;
        Poly b;
    };
    const size_t nd = std::min<size_t>(dps.size(), 8);
    std::vector<Cand> cands;
    std::vector<int> m(nd, 0);
    while (true) {
        int tot = 0;
        for (int v : m) tot += v;
        if (tot <= 4) {
            Poly b(1);
            for (size_t i = 0; i < nd; ++i)
                if (m[i] > 0) b *= dps[i].p.pow(static_cast<uint32_t>(m[i]));
            cands.push_back({tot, b.degree(), m, std::move(b)});
        }
        size_t j = 0;
        while (j < nd && ++m[j] == 3) m[j++] = 0;
        if (j == nd) break;
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.tot != b.tot) return a.tot < b.tot;
        if (a.deg != b.deg) return a.deg < b.deg;
        return a.m < b.m;
    });
    if (cands.size() > static_cast<size_t>(cap)) cands.resize(cap);
    std::vector<Poly> out;
    out.reserve(cands.size());
    for (auto& c : cands) out.push_back(std::move(c.b));
    return out;
}

// Everything one end-to-end attempt produces, snapshotted into the report
// either on success or when the attempt got deeper than any other.
struct Attempt {
    int k = 0;
    RatFn s;
    std::optional<STriple> triple;
    std::vector<DarbouxPair> dps;
    std::optional<ExpPart> exp_part;
    std::optional<CofactorBalance> balance;
    std::optional<Poly> p0;
    std::optional<Rational> n0;
    std::optional<IntegratingFactor> integrating_factor;
    std::optional<FirstIntegralForm> first_integral;
    std::optional<IntegralResidual> residual;
};

struct Runner {
    const Ode2& ode;
    const PipelineConfig& cfg;
    PipelineReport rep;
    std::map<std::string, uint64_t> stage_ms;

    int fail_depth = -1;
    std::string fail_reason;

    Runner(const Ode2& o, const PipelineConfig& c) : ode(o), cfg(c) {}

    struct ScopedTimer {
        Runner& r;
        std::string stage;
        Clock::time_point t0 = Clock::now();
        ScopedTimer(Runner& rr, std::string st) : r(rr), stage(std::move(st)) {}
        ~ScopedTimer() {
            r.stage_ms[stage] +=
                static_cast<uint64_t>(std::chrono::duration_cast<
                                          std::chrono::milliseconds>(
                                          Clock::now() - t0)
                                          .count());
        }
    };

    bool stage_over_budget(int stage) const {
        if (cfg.stage_time_budget_ms == 0) return false;
        auto it = stage_ms.find(stage_name(stage));
        return it != stage_ms.end() && it->second > cfg.stage_time_budget_ms;
    }

    // Records a dead end; the report keeps the artifacts of whichever
    // attempt got deepest.
    void fail(int depth, const std::string& reason, const Attempt& at) {
        if (depth <= fail_depth) return;
        fail_depth = depth;
        fail_reason = reason;
        rep.used_k = at.k;
        rep.used_s = at.s;
        rep.triple = at.triple;
        rep.dps = at.dps;
        rep.exp_part = at.exp_part;
        rep.balance = at.balance;
        rep.p0 = at.p0;
        rep.n0 = at.n0;
        rep.integrating_factor = at.integrating_factor;
        rep.first_integral = at.first_integral;
        rep.residual = at.residual;
    }

    void succeed(const Attempt& at) {
        rep.success = true;
        rep.failure_stage.clear();
        rep.failure_reason.clear();
        rep.used_k = at.k;
        rep.used_s = at.s;
        rep.triple = at.triple;
        rep.dps = at.dps;
        rep.exp_part = at.exp_part;
        rep.balance = at.balance;
        rep.p0 = at.p0;
        rep.n0 = at.n0;
        rep.integrating_factor = at.integrating_factor;
        rep.first_integral = at.first_integral;
        rep.residual = at.residual;
    }

    // Balance candidate -> recovery -> assembly -> integration -> check.
    // True on a certified integral (report already updated).
    bool try_balance(Attempt at, const JointBalance& jb, std::string* why) {
        at.exp_part = jb.exp;
        at.balance = jb.balance;

        std::vector<std::pair<DarbouxPair, Rational>> factors;
        for (const auto& [j, n] : jb.balance.exponents)
            if (!is_zero(n)) factors.emplace_back(at.dps[j], n);

        bool needs_p0 = false;
        for (const auto& [i, u] : jb.balance.n0q0)
            if (!u.is_zero()) needs_p0 = true;

        if (needs_p0) {
            if (stage_over_budget(kRecover)) {
                *why = "recovery time budget exhausted";
                fail(kRecover, *why, at);
                return false;
            }
            ScopedTimer st(*this, stage_name(kRecover));
            auto rec = recover_dp(*at.triple, jb.balance, cfg.deg_p0_cap,
                                  cfg.n0_trials);
            if (!rec) {
                *why = "no factor matches the unknown-cofactor blocks within "
                       "the degree cap";
                fail(kRecover, *why, at);
                return false;
            }
            at.p0 = rec->p0;
            at.n0 = rec->n0;
            DarbouxPair dp0;
            dp0.p = rec->p0;
            for (int i = 1; i <= 3; ++i) {
                Poly u;
                if (auto it = jb.balance.n0q0.find(i);
                    it != jb.balance.n0q0.end())
                    u = it->second;
                u.mul_scalar(Rational(1) / rec->n0);
                dp0.cofactors[i] = std::move(u);
            }
            factors.emplace_back(std::move(dp0), rec->n0);
        }

        IntegratingFactor r;
        try {
            ScopedTimer st(*this, stage_name(kAssemble));
            r = assemble_R(*at.triple, jb.exp, factors);
        } catch (const IdentityFails& e) {
            *why = "integrating-factor identity fails on field " +
                   std::to_string(e.field);
            fail(kAssemble, *why, at);
            return false;
        }
        at.integrating_factor = r;

        std::vector<Poly> hints;
        hints.reserve(at.dps.size());
        for (const auto& dp : at.dps) hints.push_back(dp.p);

        std::optional<FirstIntegralForm> j;
        {
            ScopedTimer st(*this, stage_name(kIntegrate));
            for (int32_t dc = 2; dc <= cfg.deg_c_cap && !j; dc += 2) {
                if (stage_over_budget(kIntegrate)) break;
                try {
                    j = integrate_closed_form(r, *at.triple, dc, hints);
                } catch (const AnsatzExhausted&) {
                }
            }
        }
        if (!j) {
            *why = "no closed form within the ansatz degree cap";
            fail(kIntegrate, *why, at);
            return false;
        }
        at.first_integral = *j;

        IntegralResidual res;
        {
            ScopedTimer st(*this, stage_name(kVerify));
            res = verify_first_integral(ode, *j);
        }
        at.residual = res;
        if (!res.is_zero()) {
            *why = "verification residual is nonzero";
            fail(kVerify, *why, at);
            return false;
        }
        succeed(at);
        return true;
    }

    // One ratio candidate, end to end. True on success; otherwise *why
    // explains the discard.
    bool try_candidate(int k, const RatFn& s, std::string* why) {
        Attempt at;
        at.k = k;
        at.s = s;

        try {
            ScopedTimer st(*this, stage_name(kTriple));
            at.triple = build_triple(ode, s, k);
        } catch (const DegenerateTriple&) {
            *why = "ratio clears to a degenerate triple";
            fail(kTriple, *why, at);
            return false;
        }

        QuadSolveCaps dp_caps = cfg.quad_caps;
        dp_caps.work_budget =
            std::min(dp_caps.work_budget, cfg.dp_work_budget);
        dp_caps.sweep_work_budget =
            std::min(dp_caps.sweep_work_budget, cfg.dp_sweep_work_budget);
        try {
            ScopedTimer st(*this, stage_name(kDps));
            at.dps = find_triple_dps(*at.triple, cfg.dp_degree_main,
                                     cfg.dp_degree_param, dp_caps);
        } catch (const BudgetExceeded&) {
            rep.notes.push_back(
                "darboux search truncated by solver budget; continuing "
                "with no found factors");
            at.dps.clear();
        }

        bool any_balance = false;
        std::string local_why = "no exponential part and cofactor balance "
                                "for any denominator candidate";
        for (const Poly& b : b_candidates(at.dps, cfg.b_subset_cap)) {
            if (stage_over_budget(kBalance)) break;
            const int32_t deg_a =
                cfg.deg_a >= 0 ? cfg.deg_a
                               : std::max<int32_t>(2, b.degree());
            std::vector<JointBalance> jbs;
            {
                ScopedTimer st(*this, stage_name(kBalance));
                jbs = joint_balance_candidates(*at.triple, at.dps, b, deg_a,
                                               cfg.deg_q0, cfg.balance_cap);
            }
            for (const JointBalance& jb : jbs) {
                any_balance = true;
                if (try_balance(at, jb, &local_why)) return true;
            }
        }
        if (!any_balance) fail(kBalance, local_why, at);
        *why = local_why;
        return false;
    }

    PipelineReport run() {
        rep.ode = ode;
        const auto t_total = Clock::now();

        uint64_t work_left = cfg.s_work_budget;
        QuadSolveCaps scaps = cfg.quad_caps;
        if (scaps.max_solutions == 0) scaps.max_solutions = 4;

        std::set<std::pair<int, std::string>> seen;
        std::set<int> dead_channels;
        bool budget_noted = false;
        bool done = false;

        for (const DegreeBounds& rung : cfg.s_degree_ladder) {
            for (int k : cfg.s_search_order) {
                if (done) break;
                if (dead_channels.count(k)) continue;
                if (work_left == 0) {
                    if (!budget_noted) {
                        rep.notes.push_back(
                            "ratio search stopped: work budget exhausted");
                        budget_noted = true;
                    }
                    break;
                }
                if (stage_over_budget(kSFunction)) break;

                QuadSolveCaps caps = scaps;
                caps.sweep_work_budget =
                    std::min(caps.sweep_work_budget, work_left);
                caps.work_budget =
                    std::min(caps.work_budget, caps.sweep_work_budget);

                std::vector<RatFn> found;
                uint64_t used = 0;
                try {
                    ScopedTimer st(*this, stage_name(kSFunction));
                    found = find_sfunction(ode, k, rung, caps,
                                           cfg.s_max_candidates, &used);
                } catch (const DegenerateEquation&) {
                    rep.notes.push_back(
                        "channel " + std::to_string(k) +
                        ": defining equation degenerate for this input");
                    dead_channels.insert(k);
                    continue;
                } catch (const BudgetExceeded&) {
                    rep.notes.push_back(
                        "channel " + std::to_string(k) + " bounds (" +
                        std::to_string(rung.num) + "," +
                        std::to_string(rung.den) +
                        "): sweep truncated by work budget");
                }
                work_left -= std::min(used, work_left);

                for (const RatFn& s : found) {
                    const std::string key = format_expression(s);
                    if (!seen.insert({k, key}).second) continue;
                    SCandidate cand;
                    cand.k = k;
                    cand.s = s;
                    std::string why;
                    if (try_candidate(k, s, &why)) {
                        cand.used = true;
                        rep.s_functions.push_back(std::move(cand));
                        done = true;
                        break;
                    }
                    cand.note = why;
                    rep.s_functions.push_back(std::move(cand));
                }
            }
            if (done || (work_left == 0 && budget_noted)) break;
        }

        if (!rep.success) {
            if (fail_depth < 0) {
                rep.failure_stage = stage_name(kSFunction);
                rep.failure_reason =
                    "no rational ratio function within the degree ladder "
                    "and work budget";
            } else {
                rep.failure_stage = stage_name(fail_depth);
                rep.failure_reason = fail_reason;
            }
        }

        for (int s = kSFunction; s <= kVerify; ++s)
            if (auto it = stage_ms.find(stage_name(s)); it != stage_ms.end())
                rep.timings.push_back({it->first, it->second});
        rep.timings.push_back(
            {"total",
             static_cast<uint64_t>(
                 std::chrono::duration_cast<std::chrono::milliseconds>(
                     Clock::now() - t_total)
                     .count())});
        return rep;
    }
};

}  // namespace

PipelineReport run_pipeline(const Ode2& ode, const PipelineConfig& cfg) {
    validate(cfg);
    Runner r(ode, cfg);
    return r.run();
}

}  // namespace lfint

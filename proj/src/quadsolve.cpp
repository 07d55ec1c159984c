#include "lfint/quadsolve.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>

namespace lfint {

namespace {

// Exact square root in Q: both numerator and denominator must be perfect
// squares (the representation is canonical, so they are coprime).
std::optional<Rational> rational_sqrt(const Rational& q) {
    if (sgn(q) < 0) return std::nullopt;
    const mpz_class num = q.get_num(), den = q.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) ||
        !mpz_perfect_square_p(den.get_mpz_t()))
        return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return Rational(rn) / Rational(rd);
}

}  // namespace

QuadForm QuadForm::unknown(uint32_t i) {
    QuadForm f;
    f.lin[i] = 1;
    return f;
}

void QuadForm::add_lin(uint32_t i, const Rational& v) {
    if (lfint::is_zero(v)) return;
    auto it = lin.find(i);
    if (it == lin.end()) {
        lin.emplace(i, v);
    } else {
        it->second += v;
        if (lfint::is_zero(it->second)) lin.erase(it);
    }
}

void QuadForm::add_quad(uint32_t i, uint32_t j, const Rational& v) {
    if (lfint::is_zero(v)) return;
    if (i > j) std::swap(i, j);
    auto key = std::make_pair(i, j);
    auto it = quad.find(key);
    if (it == quad.end()) {
        quad.emplace(key, v);
    } else {
        it->second += v;
        if (lfint::is_zero(it->second)) quad.erase(it);
    }
}

QuadForm QuadForm::operator-() const {
    QuadForm r(*this);
    r.c = -r.c;
    for (auto& [i, v] : r.lin) v = -v;
    for (auto& [k, v] : r.quad) v = -v;
    return r;
}

QuadForm& QuadForm::operator+=(const QuadForm& o) {
    c += o.c;
    for (const auto& [i, v] : o.lin) add_lin(i, v);
    for (const auto& [k, v] : o.quad) add_quad(k.first, k.second, v);
    return *this;
}

QuadForm& QuadForm::operator-=(const QuadForm& o) {
    c -= o.c;
    for (const auto& [i, v] : o.lin) add_lin(i, -v);
    for (const auto& [k, v] : o.quad) add_quad(k.first, k.second, -v);
    return *this;
}

QuadForm operator*(const QuadForm& a, const QuadForm& b) {
    if (a.degree() + b.degree() > 2)
        throw std::logic_error("QuadForm product exceeds degree 2");
    QuadForm r;
    r.c = a.c * b.c;
    for (const auto& [i, v] : b.lin) r.add_lin(i, a.c * v);
    for (const auto& [k, v] : b.quad) r.add_quad(k.first, k.second, a.c * v);
    for (const auto& [i, v] : a.lin) {
        r.add_lin(i, v * b.c);
        for (const auto& [j, w] : b.lin) r.add_quad(i, j, v * w);
    }
    for (const auto& [k, v] : a.quad) r.add_quad(k.first, k.second, v * b.c);
    return r;
}

QuadForm& QuadForm::mul_scalar(const Rational& k) {
    if (lfint::is_zero(k)) {
        c = 0;
        lin.clear();
        quad.clear();
        return *this;
    }
    c *= k;
    for (auto& [i, v] : lin) v *= k;
    for (auto& [p, v] : quad) v *= k;
    return *this;
}

void QuadForm::substitute_affine(uint32_t u, const QuadForm& val) {
    if (val.degree() > 1)
        throw std::logic_error("substitute_affine: value not affine");
    QuadForm r;
    r.c = c;
    for (const auto& [i, v] : lin) {
        if (i == u) {
            QuadForm t(val);
            t.mul_scalar(v);
            r += t;
        } else {
            r.add_lin(i, v);
        }
    }
    for (const auto& [k, v] : quad) {
        const uint32_t i = k.first, j = k.second;
        if (i == u && j == u) {
            QuadForm t = val * val;
            t.mul_scalar(v);
            r += t;
        } else if (i == u || j == u) {
            QuadForm t = val * QuadForm::unknown(i == u ? j : i);
            t.mul_scalar(v);
            r += t;
        } else {
            r.add_quad(i, j, v);
        }
    }
    *this = std::move(r);
}

void QuadForm::substitute_const(uint32_t u, const Rational& v) {
    substitute_affine(u, QuadForm(v));
}

bool QuadForm::substitute_consts(const std::map<uint32_t, Rational>& vals) {
    bool changed = false;
    for (auto it = lin.begin(); it != lin.end();) {
        auto vit = vals.find(it->first);
        if (vit == vals.end()) {
            ++it;
            continue;
        }
        c += it->second * vit->second;
        it = lin.erase(it);
        changed = true;
    }
    std::vector<std::pair<uint32_t, Rational>> demoted;
    for (auto it = quad.begin(); it != quad.end();) {
        const auto fi = vals.find(it->first.first);
        const auto fj = vals.find(it->first.second);
        if (fi == vals.end() && fj == vals.end()) {
            ++it;
            continue;
        }
        if (fi != vals.end() && fj != vals.end()) {
            c += it->second * fi->second * fj->second;
        } else if (fi != vals.end()) {
            demoted.emplace_back(it->first.second, it->second * fi->second);
        } else {
            demoted.emplace_back(it->first.first, it->second * fj->second);
        }
        it = quad.erase(it);
        changed = true;
    }
    for (const auto& [u, v] : demoted) add_lin(u, v);
    return changed;
}

bool QuadForm::zero_out(uint32_t u) {
    bool changed = lin.erase(u) > 0;
    for (auto it = quad.begin(); it != quad.end();) {
        if (it->first.first == u || it->first.second == u) {
            it = quad.erase(it);
            changed = true;
        } else {
            ++it;
        }
    }
    return changed;
}

void QuadForm::strip_content() {
    Rational g(0);
    auto feed = [&](const Rational& v) {
        if (!lfint::is_zero(v)) g = lfint::is_zero(g) ? abs(v) : rational_gcd(g, v);
    };
    feed(c);
    for (const auto& [i, v] : lin) feed(v);
    for (const auto& [k, v] : quad) feed(v);
    if (lfint::is_zero(g) || g == 1) return;
    const Rational inv = Rational(1) / g;
    c *= inv;
    for (auto& [i, v] : lin) v *= inv;
    for (auto& [k, v] : quad) v *= inv;
}

Rational QuadForm::evaluate(const std::vector<Rational>& point) const {
    Rational r = c;
    for (const auto& [i, v] : lin) r += v * point.at(i);
    for (const auto& [k, v] : quad) r += v * point.at(k.first) * point.at(k.second);
    return r;
}

std::vector<uint32_t> QuadForm::unknowns() const {
    std::set<uint32_t> s;
    for (const auto& [i, v] : lin) s.insert(i);
    for (const auto& [k, v] : quad) {
        s.insert(k.first);
        s.insert(k.second);
    }
    return {s.begin(), s.end()};
}

namespace {

// Sign-normalize so that the first nonzero coefficient (quadratic block
// first, then linear, then constant) is positive; collapses eq and -eq.
void sign_normalize(QuadForm& f) {
    int s = 0;
    if (!f.quad.empty())
        s = sgn(f.quad.begin()->second);
    else if (!f.lin.empty())
        s = sgn(f.lin.begin()->second);
    else
        s = sgn(f.c);
    if (s < 0) f = -f;
}

// If d == r^2 for some affine form r, return r (one of the two signs).
std::optional<QuadForm> perfect_square_affine(const QuadForm& d) {
    if (d.is_constant()) {
        auto r = rational_sqrt(d.c);
        if (!r) return std::nullopt;
        return QuadForm(*r);
    }
    if (d.quad.empty()) return std::nullopt;  // affine square has quad terms
    // A diagonal entry is required; build the candidate from the lowest one.
    uint32_t w = 0;
    Rational s(0);
    bool found = false;
    for (const auto& [k, v] : d.quad) {
        if (k.first == k.second) {
            w = k.first;
            s = v;
            found = true;
            break;
        }
    }
    if (!found) return std::nullopt;
    auto t0 = rational_sqrt(s);
    if (!t0) return std::nullopt;
    QuadForm r;
    r.add_lin(w, *t0);
    const Rational two_t0 = 2 * (*t0);
    for (const auto& [k, v] : d.quad) {
        if (k.first == k.second) continue;
        if (k.first == w)
            r.add_lin(k.second, v / two_t0);
        else if (k.second == w)
            r.add_lin(k.first, v / two_t0);
    }
    auto lw = d.lin.find(w);
    r.c = (lw == d.lin.end()) ? Rational(0) : lw->second / two_t0;
    if (r * r == d) return r;
    return std::nullopt;
}

// Conservative per-equation unknown-occurrence bitset: a set bit may be
// stale (unknown since eliminated) but a clear bit is authoritative, so it
// is safe to skip equations whose bits miss the query.
using VarMask = std::vector<uint64_t>;

struct SearchState {
    std::vector<QuadForm> eqs;
    std::vector<char> dirty;             // parallel to eqs: needs renormalizing
    std::vector<VarMask> mask;           // parallel to eqs: unknowns present
    std::vector<Rational> values;        // resolved constants, indexed by unknown
    std::vector<bool> has_value;
    std::vector<std::pair<uint32_t, QuadForm>> defs;  // elimination definitions
    int depth = 0;

    void mark_all_dirty() { dirty.assign(eqs.size(), 1); }
};

class QuadSearch {
  public:
    QuadSearch(const PolySystem& sys, const QuadSolveCaps& caps)
        : sys_(sys), caps_(caps),
          nw_((sys.num_unknowns + 63) / 64 + (sys.num_unknowns == 0)) {
        for (const auto& e : sys_.equations) sys_entries_ += e.entry_count();
    }

    QuadSolveResult run() {
        SearchState root;
        root.eqs = sys_.equations;
        root.mark_all_dirty();
        root.mask.reserve(root.eqs.size());
        for (const auto& e : root.eqs) root.mask.push_back(compute_mask(e));
        root.values.assign(sys_.num_unknowns, Rational(0));
        root.has_value.assign(sys_.num_unknowns, false);
        std::deque<SearchState> stack;
        stack.push_back(std::move(root));
        uint64_t nodes = 0;
        while (!stack.empty()) {
            if (++nodes > caps_.node_budget || work_ > caps_.work_budget) {
                result_.budget_exceeded = true;
                break;
            }
            SearchState st = std::move(stack.back());
            stack.pop_back();
            process(st, stack);
            if (caps_.max_solutions > 0 &&
                found_.size() >= caps_.max_solutions && !stack.empty()) {
                result_.budget_exceeded = true;  // tree not exhausted
                break;
            }
        }
        for (const auto& pt : found_) result_.solutions.push_back(pt);
        result_.work_used = work_;
        return std::move(result_);
    }

  private:
    const PolySystem& sys_;
    QuadSolveCaps caps_;
    QuadSolveResult result_;
    std::set<std::vector<Rational>> found_;
    uint64_t work_ = 0;
    uint64_t sys_entries_ = 0;
    uint32_t nw_;  // words per VarMask

    VarMask compute_mask(const QuadForm& e) const {
        VarMask m(nw_, 0);
        for (const auto& [u, v] : e.lin) m[u >> 6] |= 1ull << (u & 63);
        for (const auto& [k, v] : e.quad) {
            m[k.first >> 6] |= 1ull << (k.first & 63);
            m[k.second >> 6] |= 1ull << (k.second & 63);
        }
        return m;
    }
    static bool mask_test(const VarMask& m, uint32_t u) {
        return (m[u >> 6] >> (u & 63)) & 1;
    }
    static bool mask_any(const VarMask& m, const VarMask& q) {
        for (size_t i = 0; i < m.size(); ++i)
            if (m[i] & q[i]) return true;
        return false;
    }
    static void mask_or(VarMask& m, const VarMask& q) {
        for (size_t i = 0; i < m.size(); ++i) m[i] |= q[i];
    }

    bool out_of_work() {
        if (work_ <= caps_.work_budget) return false;
        result_.budget_exceeded = true;
        return true;
    }

    void assign_consts(SearchState& st, const std::map<uint32_t, Rational>& vals) {
        VarMask qm(nw_, 0);
        for (const auto& [u, v] : vals) {
            st.values[u] = v;
            st.has_value[u] = true;
            qm[u >> 6] |= 1ull << (u & 63);
        }
        work_ += st.eqs.size();
        for (size_t i = 0; i < st.eqs.size(); ++i) {
            if (!mask_any(st.mask[i], qm)) continue;
            work_ += st.eqs[i].entry_count();
            if (st.eqs[i].substitute_consts(vals)) st.dirty[i] = 1;
        }
    }

    void assign_const(SearchState& st, uint32_t u, const Rational& v) {
        assign_consts(st, {{u, v}});
    }

    // One substitution pass applying several pairwise-independent
    // definitions; `elim` is the bitset of all defined unknowns.
    void define_affine_batch(SearchState& st,
                             const std::vector<std::pair<uint32_t, QuadForm>>& batch,
                             const VarMask& elim) {
        std::vector<VarMask> vms;
        vms.reserve(batch.size());
        for (const auto& [u, val] : batch) {
            st.defs.emplace_back(u, val);
            vms.push_back(compute_mask(val));
        }
        work_ += st.eqs.size();
        for (size_t i = 0; i < st.eqs.size(); ++i) {
            if (!mask_any(st.mask[i], elim)) continue;
            auto& e = st.eqs[i];
            bool hit = false;
            for (size_t bi = 0; bi < batch.size(); ++bi) {
                const uint32_t u = batch[bi].first;
                if (!mask_test(st.mask[i], u)) continue;
                if (!e.lin.count(u) && !unknown_in_quad(e, u)) continue;
                work_ += e.entry_count();
                e.substitute_affine(u, batch[bi].second);
                mask_or(st.mask[i], vms[bi]);
                hit = true;
            }
            if (hit) st.dirty[i] = 1;
        }
    }

    void define_affine(SearchState& st, uint32_t u, const QuadForm& val) {
        st.defs.emplace_back(u, val);
        const VarMask vm = compute_mask(val);
        work_ += st.eqs.size();
        for (size_t i = 0; i < st.eqs.size(); ++i) {
            auto& e = st.eqs[i];
            if (!mask_test(st.mask[i], u)) continue;
            work_ += e.entry_count();
            const bool touches =
                e.lin.count(u) || unknown_in_quad(e, u);
            if (!touches) continue;
            e.substitute_affine(u, val);
            mask_or(st.mask[i], vm);
            st.dirty[i] = 1;
        }
    }

    // Substitute a (possibly quadratic) definition; caller must have checked
    // that u appears in no quadratic term of any remaining equation.
    void define_general(SearchState& st, uint32_t u, const QuadForm& val) {
        st.defs.emplace_back(u, val);
        const VarMask vm = compute_mask(val);
        work_ += st.eqs.size();
        for (size_t i = 0; i < st.eqs.size(); ++i) {
            auto& e = st.eqs[i];
            if (!mask_test(st.mask[i], u)) continue;
            auto it = e.lin.find(u);
            if (it == e.lin.end()) continue;
            const Rational a = it->second;
            e.lin.erase(it);
            QuadForm t(val);
            t.mul_scalar(a);
            work_ += t.entry_count();
            e += t;
            mask_or(st.mask[i], vm);
            st.dirty[i] = 1;
        }
    }

    bool unknown_in_quad(const QuadForm& e, uint32_t u) const {
        for (const auto& [k, v] : e.quad)
            if (k.first == u || k.second == u) return true;
        return false;
    }

    // Returns false when the state is contradictory. Renormalizes only
    // equations touched since the last pass, then drops zero equations and
    // exact duplicates.
    bool normalize(SearchState& st) {
        for (size_t i = 0; i < st.eqs.size(); ++i) {
            if (!st.dirty[i]) continue;
            auto& e = st.eqs[i];
            work_ += e.entry_count();
            e.strip_content();
            sign_normalize(e);
            if (e.is_constant() && !e.is_zero()) return false;
            st.mask[i] = compute_mask(e);  // retighten stale bits
        }
        auto key_less = [](const QuadForm* a, const QuadForm* b) {
            if (a->quad != b->quad) return a->quad < b->quad;
            if (a->lin != b->lin) return a->lin < b->lin;
            return a->c < b->c;
        };
        std::set<const QuadForm*, decltype(key_less)> seen(key_less);
        std::vector<QuadForm> keep;
        std::vector<VarMask> keep_mask;
        keep.reserve(st.eqs.size());
        keep_mask.reserve(st.eqs.size());
        for (size_t i = 0; i < st.eqs.size(); ++i) {
            auto& e = st.eqs[i];
            if (e.is_zero()) continue;
            keep.push_back(std::move(e));
            if (!seen.insert(&keep.back()).second) {
                keep.pop_back();
                continue;
            }
            keep_mask.push_back(std::move(st.mask[i]));
        }
        st.eqs = std::move(keep);
        st.mask = std::move(keep_mask);
        st.dirty.assign(st.eqs.size(), 0);
        return true;
    }

    uint64_t state_entries(const SearchState& st) const {
        uint64_t n = 0;
        for (const auto& e : st.eqs) n += e.entry_count();
        return n;
    }

    void emit_leaf(SearchState& st) {
        std::vector<Rational> pt(sys_.num_unknowns, Rational(0));
        for (uint32_t i = 0; i < sys_.num_unknowns; ++i)
            if (st.has_value[i]) pt[i] = st.values[i];
        // Later definitions cannot mention earlier-defined unknowns (those
        // were already substituted away), so resolve newest-first.
        for (auto it = st.defs.rbegin(); it != st.defs.rend(); ++it)
            pt[it->first] = it->second.evaluate(pt);
        work_ += sys_entries_;
        for (const auto& e : sys_.equations)
            if (!lfint::is_zero(e.evaluate(pt))) return;  // reject, keep searching
        found_.insert(std::move(pt));
    }

    // All equations affine: finish with one exact linear solve.
    void linear_endgame(SearchState& st) {
        std::vector<uint32_t> live;
        std::map<uint32_t, uint32_t> index;
        for (const auto& e : st.eqs)
            for (uint32_t u : e.unknowns())
                if (!index.count(u)) {
                    index[u] = static_cast<uint32_t>(live.size());
                    live.push_back(u);
                }
        LinearSystem ls;
        ls.num_unknowns = static_cast<uint32_t>(live.size());
        for (const auto& e : st.eqs) {
            LinEq le;
            le.constant = e.c;
            for (const auto& [u, v] : e.lin) le.add(index[u], v);
            ls.equations.push_back(std::move(le));
        }
        const uint64_t m = st.eqs.size();
        const uint64_t n = live.size();
        work_ += m * n * std::min(m, n);  // elimination cost estimate
        auto sol = solve_linear(ls);
        if (!sol) return;
        for (uint32_t k = 0; k < live.size(); ++k) {
            st.values[live[k]] = sol->particular[k];
            st.has_value[live[k]] = true;
        }
        emit_leaf(st);
    }

    void push_child(SearchState&& child, std::deque<SearchState>& stack) {
        if (child.depth > caps_.depth ||
            stack.size() >= static_cast<size_t>(caps_.branch_width)) {
            result_.budget_exceeded = true;
            return;
        }
        work_ += state_entries(child);  // charge for the state copy
        stack.push_back(std::move(child));
    }

    void erase_eq(SearchState& st, size_t ei) {
        st.eqs.erase(st.eqs.begin() + static_cast<long>(ei));
        st.dirty.erase(st.dirty.begin() + static_cast<long>(ei));
        st.mask.erase(st.mask.begin() + static_cast<long>(ei));
    }

    void process(SearchState& st, std::deque<SearchState>& stack) {
        // ---- deterministic propagation to a fixed point ----
        for (;;) {
            if (out_of_work()) return;
            if (!normalize(st)) return;
            if (st.eqs.empty()) {
                emit_leaf(st);
                return;
            }
            bool all_affine = true;
            for (const auto& e : st.eqs)
                if (e.degree() == 2) {
                    all_affine = false;
                    break;
                }
            if (all_affine) {
                linear_endgame(st);
                return;
            }
            // Single-unknown linear equations: batch all forced assignments.
            std::map<uint32_t, Rational> forced;
            for (const auto& e : st.eqs) {
                if (!e.quad.empty() || e.lin.size() != 1) continue;
                const uint32_t u = e.lin.begin()->first;
                const Rational v = -e.c / e.lin.begin()->second;
                auto [it, fresh] = forced.emplace(u, v);
                if (!fresh && it->second != v) return;  // contradictory
            }
            if (!forced.empty()) {
                assign_consts(st, forced);
                continue;
            }
            bool changed = false;
            // Single-unknown quadratic: resolve via the discriminant. A
            // double root assigns; a non-square or negative discriminant
            // kills the branch; two roots are handled in the branch phase.
            for (const auto& e : st.eqs) {
                auto us = e.unknowns();
                if (us.size() != 1 || e.degree() != 2) continue;
                const uint32_t u = us[0];
                auto qit = e.quad.find({u, u});
                const Rational a = qit->second;
                auto lit = e.lin.find(u);
                const Rational b = (lit == e.lin.end()) ? Rational(0) : lit->second;
                const Rational disc = b * b - 4 * a * e.c;
                auto r = rational_sqrt(disc);
                if (!r) return;  // no rational root on this branch
                if (lfint::is_zero(*r)) {
                    assign_const(st, u, -b / (2 * a));
                    changed = true;
                    break;
                }
            }
            if (changed) continue;
            // Affine elimination: an unknown with constant coefficient whose
            // complement is affine can be solved for and substituted away.
            // Pairwise-independent definitions (no chosen unknown appears in
            // another chosen value) are batched into one substitution pass.
            std::vector<std::pair<uint32_t, QuadForm>> batch;
            std::vector<size_t> sources;
            VarMask elim(nw_, 0), refs(nw_, 0);
            for (size_t ei = 0; ei < st.eqs.size(); ++ei) {
                const QuadForm& e = st.eqs[ei];
                for (const auto& [u, a] : e.lin) {
                    if (mask_test(elim, u) || mask_test(refs, u)) continue;
                    if (unknown_in_quad(e, u)) continue;
                    QuadForm rest(e);
                    rest.lin.erase(u);
                    if (rest.degree() > 1) continue;
                    const VarMask vm = compute_mask(rest);
                    if (mask_any(vm, elim)) continue;
                    rest.mul_scalar(Rational(-1) / a);
                    batch.emplace_back(u, std::move(rest));
                    sources.push_back(ei);
                    elim[u >> 6] |= 1ull << (u & 63);
                    mask_or(refs, vm);
                    break;  // at most one definition per source equation
                }
            }
            if (!batch.empty()) {
                for (size_t si = sources.size(); si-- > 0;)
                    erase_eq(st, sources[si]);
                define_affine_batch(st, batch, elim);
                continue;
            }
            // Quadratic-complement elimination: allowed when the unknown
            // appears at most linearly everywhere else.
            for (size_t ei = 0; ei < st.eqs.size() && !changed; ++ei) {
                const QuadForm& e = st.eqs[ei];
                for (const auto& [u, a] : e.lin) {
                    if (unknown_in_quad(e, u)) continue;
                    bool ok = true;
                    for (size_t j = 0; j < st.eqs.size(); ++j) {
                        if (j == ei) continue;
                        if (unknown_in_quad(st.eqs[j], u)) {
                            ok = false;
                            break;
                        }
                    }
                    if (!ok) continue;
                    QuadForm rest(e);
                    rest.lin.erase(u);
                    rest.mul_scalar(Rational(-1) / a);
                    QuadForm picked = rest;
                    uint32_t uu = u;
                    erase_eq(st, ei);
                    define_general(st, uu, picked);
                    changed = true;
                    break;
                }
            }
            if (changed) continue;
            break;  // fixed point; fall through to branching
        }

        // ---- branch phase ----
        // (1) single-unknown quadratic with two rational roots
        for (const auto& e : st.eqs) {
            auto us = e.unknowns();
            if (us.size() != 1 || e.degree() != 2) continue;
            const uint32_t u = us[0];
            const Rational a = e.quad.find({u, u})->second;
            auto lit = e.lin.find(u);
            const Rational b = (lit == e.lin.end()) ? Rational(0) : lit->second;
            auto r = rational_sqrt(b * b - 4 * a * e.c);
            if (!r || lfint::is_zero(*r)) continue;
            for (int sgn_pick : {-1, +1}) {
                SearchState child(st);
                ++child.depth;
                assign_const(child, u, (-b + sgn_pick * (*r)) / (2 * a));
                push_child(std::move(child), stack);
            }
            return;
        }
        // (2) equation divisible by an unknown: factor and branch
        for (size_t ei = 0; ei < st.eqs.size(); ++ei) {
            const QuadForm& e = st.eqs[ei];
            if (!lfint::is_zero(e.c)) continue;
            for (uint32_t u : e.unknowns()) {
                bool divides = true;
                for (const auto& [i, v] : e.lin)
                    if (i != u) {
                        divides = false;
                        break;
                    }
                for (const auto& [k, v] : e.quad)
                    if (divides && k.first != u && k.second != u) divides = false;
                if (!divides) continue;
                QuadForm quot;
                auto lit = e.lin.find(u);
                if (lit != e.lin.end()) quot.c = lit->second;
                for (const auto& [k, v] : e.quad) {
                    if (k.first == u && k.second == u)
                        quot.add_lin(u, v);
                    else
                        quot.add_lin(k.first == u ? k.second : k.first, v);
                }
                SearchState zero_child(st);
                ++zero_child.depth;
                erase_eq(zero_child, ei);
                assign_const(zero_child, u, Rational(0));
                SearchState quot_child(st);
                ++quot_child.depth;
                quot_child.mask[ei] = compute_mask(quot);
                quot_child.eqs[ei] = quot;
                quot_child.dirty[ei] = 1;
                push_child(std::move(zero_child), stack);
                push_child(std::move(quot_child), stack);
                return;
            }
        }
        // (3) quadratic in its lowest unknown with constant leading
        //     coefficient and a discriminant that is a perfect square of an
        //     affine form: two affine branches.
        for (size_t ei = 0; ei < st.eqs.size(); ++ei) {
            const QuadForm& e = st.eqs[ei];
            auto us = e.unknowns();
            if (us.empty()) continue;
            const uint32_t u = us[0];
            auto qit = e.quad.find({u, u});
            if (qit == e.quad.end()) continue;
            const Rational a = qit->second;
            QuadForm b;
            QuadForm cpart;
            cpart.c = e.c;
            auto lit = e.lin.find(u);
            if (lit != e.lin.end()) b.c = lit->second;
            for (const auto& [i, v] : e.lin)
                if (i != u) cpart.add_lin(i, v);
            for (const auto& [k, v] : e.quad) {
                if (k.first == u && k.second == u) continue;
                if (k.first == u)
                    b.add_lin(k.second, v);
                else if (k.second == u)
                    b.add_lin(k.first, v);
                else
                    cpart.add_quad(k.first, k.second, v);
            }
            QuadForm disc = b * b;
            QuadForm fourac(cpart);
            fourac.mul_scalar(4 * a);
            disc -= fourac;
            if (disc.is_constant()) {
                auto r0 = rational_sqrt(disc.c);
                if (!r0) return;  // no rational value of u for any assignment
            }
            auto r = perfect_square_affine(disc);
            if (!r) continue;
            for (int sgn_pick : {-1, +1}) {
                SearchState child(st);
                ++child.depth;
                QuadForm root = -b;
                if (sgn_pick > 0)
                    root += *r;
                else
                    root -= *r;
                root.mul_scalar(Rational(1) / (2 * a));
                erase_eq(child, ei);
                define_affine(child, u, root);
                push_child(std::move(child), stack);
            }
            return;
        }
        // No applicable rule: the search is incomplete here.
        result_.budget_exceeded = true;
    }
};

}  // namespace

QuadSolveResult solve_quadratic_bounded(const PolySystem& sys,
                                        const QuadSolveCaps& caps) {
    QuadSearch search(sys, caps);
    return search.run();
}

// ---- ansatz assembly --------------------------------------------------------

namespace {
void ansatz_insert(AnsatzPoly& a, const Monomial& m, QuadForm f) {
    if (f.is_zero()) return;
    auto it = a.find(m);
    if (it == a.end()) {
        a.emplace(m, std::move(f));
    } else {
        it->second += f;
        if (it->second.is_zero()) a.erase(it);
    }
}
}  // namespace

AnsatzPoly ansatz_from_poly(const Poly& p) {
    AnsatzPoly a;
    for (const auto& [m, c] : p.terms()) a.emplace(m, QuadForm(c));
    return a;
}

AnsatzPoly ansatz_linear(const std::vector<Monomial>& support,
                         uint32_t first_unknown) {
    AnsatzPoly a;
    uint32_t k = first_unknown;
    for (const auto& m : support) ansatz_insert(a, m, QuadForm::unknown(k++));
    return a;
}

void ansatz_add(AnsatzPoly& a, const AnsatzPoly& b) {
    for (const auto& [m, f] : b) ansatz_insert(a, m, f);
}

void ansatz_sub(AnsatzPoly& a, const AnsatzPoly& b) {
    for (const auto& [m, f] : b) ansatz_insert(a, m, -f);
}

AnsatzPoly ansatz_mul_poly(const AnsatzPoly& a, const Poly& p) {
    AnsatzPoly r;
    for (const auto& [mp, cp] : p.terms())
        for (const auto& [ma, fa] : a) {
            QuadForm f(fa);
            f.mul_scalar(cp);
            ansatz_insert(r, ma * mp, std::move(f));
        }
    return r;
}

AnsatzPoly ansatz_mul(const AnsatzPoly& a, const AnsatzPoly& b) {
    AnsatzPoly r;
    for (const auto& [ma, fa] : a)
        for (const auto& [mb, fb] : b) ansatz_insert(r, ma * mb, fa * fb);
    return r;
}

AnsatzPoly ansatz_derivative(const AnsatzPoly& a, Var v) {
    AnsatzPoly r;
    for (const auto& [m, f] : a) {
        const int32_t e = exponent(m, v);
        if (e == 0) continue;
        QuadForm g(f);
        g.mul_scalar(Rational(e));
        ansatz_insert(r, m / var_monomial(v), std::move(g));
    }
    return r;
}

std::vector<QuadForm> ansatz_equations(const AnsatzPoly& a) {
    std::vector<QuadForm> eqs;
    for (const auto& [m, f] : a)
        if (!f.is_zero()) eqs.push_back(f);
    return eqs;
}

Poly ansatz_instantiate(const AnsatzPoly& a, const std::vector<Rational>& pt) {
    Poly p;
    for (const auto& [m, f] : a) p.set(m, f.evaluate(pt));
    return p;
}

std::vector<Monomial> monomials_up_to_degree(int32_t d) {
    std::vector<Monomial> ms;
    for (int32_t ex = 0; ex <= d; ++ex)
        for (int32_t ey = 0; ey + ex <= d; ++ey)
            for (int32_t ez = 0; ez + ey + ex <= d; ++ez)
                ms.push_back({ex, ey, ez});
    std::sort(ms.begin(), ms.end(),
              [](const Monomial& a, const Monomial& b) { return glex_compare(a, b) > 0; });
    return ms;
}

}  // namespace lfint

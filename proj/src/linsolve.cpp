#include "lfint/linsolve.hpp"

#include <algorithm>

namespace lfint {

std::vector<Rational> AffineSolution::point(
    const std::vector<Rational>& params) const {
    std::vector<Rational> p = particular;
    for (size_t k = 0; k < basis.size(); ++k) {
        if (k >= params.size() || is_zero(params[k])) continue;
        for (size_t i = 0; i < p.size(); ++i) p[i] += params[k] * basis[k][i];
    }
    return p;
}

namespace {

// Sparse integer row over the augmented matrix; column num_unknowns holds
// the constant term.
struct Row {
    std::vector<std::pair<uint32_t, Int>> a;  // sorted by column

    void strip_content() {
        Int g = 0;
        for (auto& [c, v] : a) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
            if (g == 1) return;
        }
        if (g <= 1) return;
        for (auto& [c, v] : a) v /= g;
    }
    const Int* find(uint32_t col) const {
        auto it = std::lower_bound(a.begin(), a.end(), col,
                                   [](const auto& p, uint32_t c) { return p.first < c; });
        return (it != a.end() && it->first == col) ? &it->second : nullptr;
    }
};

// r := pc * r - rc * p, merged sparse, then content-stripped.
Row eliminate(const Row& r, const Row& p, const Int& pc, const Int& rc) {
    Row out;
    out.a.reserve(r.a.size() + p.a.size());
    auto ir = r.a.begin(), ip = p.a.begin();
    while (ir != r.a.end() || ip != p.a.end()) {
        if (ip == p.a.end() || (ir != r.a.end() && ir->first < ip->first)) {
            out.a.emplace_back(ir->first, pc * ir->second);
            ++ir;
        } else if (ir == r.a.end() || ip->first < ir->first) {
            out.a.emplace_back(ip->first, -rc * ip->second);
            ++ip;
        } else {
            Int v = pc * ir->second - rc * ip->second;
            if (v != 0) out.a.emplace_back(ir->first, std::move(v));
            ++ir;
            ++ip;
        }
    }
    out.strip_content();
    return out;
}

}  // namespace

std::optional<AffineSolution> solve_linear(const LinearSystem& sys) {
    const uint32_t n = sys.num_unknowns;
    const uint32_t aug = n;

    std::vector<Row> rows;
    rows.reserve(sys.equations.size());
    for (const auto& eq : sys.equations) {
        // Clear denominators to integers.
        Int lcm = 1;
        for (const auto& [u, c] : eq.coeff)
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den().get_mpz_t());
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), eq.constant.get_den().get_mpz_t());
        Row r;
        for (const auto& [u, c] : eq.coeff) {
            Rational v = c * lcm;
            r.a.emplace_back(u, v.get_num());
        }
        if (!is_zero(eq.constant)) {
            Rational v = eq.constant * lcm;
            r.a.emplace_back(aug, v.get_num());
        }
        if (r.a.empty()) continue;
        r.strip_content();
        rows.push_back(std::move(r));
    }

    std::vector<bool> active(rows.size(), true);
    std::vector<std::pair<uint32_t, size_t>> pivots;  // (column, row index)
    std::vector<bool> col_pivoted(n, false);

    while (true) {
        // Column occupancy across active rows, for sparsity-guided pivoting.
        std::vector<uint32_t> col_count(n, 0);
        size_t best_row = rows.size();
        size_t best_nnz = SIZE_MAX;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!active[i]) continue;
            size_t nnz = 0;
            for (const auto& [c, v] : rows[i].a)
                if (c != aug) {
                    ++nnz;
                    ++col_count[c];
                }
            if (nnz == 0) {
                if (!rows[i].a.empty()) return std::nullopt;  // 0 = nonzero
                active[i] = false;
                continue;
            }
            if (nnz < best_nnz) {
                best_nnz = nnz;
                best_row = i;
            }
        }
        if (best_row == rows.size()) break;  // no active rows left

        uint32_t best_col = aug;
        uint32_t best_occ = UINT32_MAX;
        for (const auto& [c, v] : rows[best_row].a) {
            if (c == aug) continue;
            if (col_count[c] < best_occ) {
                best_occ = col_count[c];
                best_col = c;
            }
        }

        const Int* pc = rows[best_row].find(best_col);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!active[i] || i == best_row) continue;
            const Int* rc = rows[i].find(best_col);
            if (!rc) continue;
            rows[i] = eliminate(rows[i], rows[best_row], *pc, *rc);
            if (rows[i].a.size() == 1 && rows[i].a[0].first == aug)
                return std::nullopt;
            if (rows[i].a.empty()) active[i] = false;
        }
        active[best_row] = false;
        col_pivoted[best_col] = true;
        pivots.emplace_back(best_col, best_row);
    }

    // Back-substitution helper: given values of free columns, fill pivots in
    // reverse elimination order.
    auto back_subst = [&](std::vector<Rational> vals, bool homogeneous) {
        for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
            const Row& r = rows[it->second];
            Rational acc(0);
            Int pivot_coeff;
            for (const auto& [c, v] : r.a) {
                if (c == it->first) {
                    pivot_coeff = v;
                } else if (c == aug) {
                    if (!homogeneous) acc += Rational(v);
                } else {
                    acc += Rational(v) * vals[c];
                }
            }
            vals[it->first] = -acc / Rational(pivot_coeff);
        }
        return vals;
    };

    AffineSolution out;
    out.particular = back_subst(std::vector<Rational>(n, Rational(0)), false);
    for (uint32_t c = 0; c < n; ++c) {
        if (col_pivoted[c]) continue;
        std::vector<Rational> v(n, Rational(0));
        v[c] = 1;
        out.basis.push_back(back_subst(std::move(v), true));
    }
    return out;
}

bool AffineSpace::coordinate_is_fixed(uint32_t i, Rational* value) const {
    for (const auto& b : s_.basis)
        if (!is_zero(b[i])) return false;
    if (value) *value = s_.particular[i];
    return true;
}

bool AffineSpace::constrain_zero(uint32_t i) {
    // Find a parameter direction that moves coordinate i.
    size_t k = s_.basis.size();
    for (size_t j = 0; j < s_.basis.size(); ++j)
        if (!is_zero(s_.basis[j][i])) {
            k = j;
            break;
        }
    if (k == s_.basis.size()) return is_zero(s_.particular[i]);

    // Shift the particular point onto the hyperplane and project the other
    // basis vectors parallel to direction k.
    std::vector<Rational> dir = s_.basis[k];
    Rational di = dir[i];
    std::vector<std::vector<Rational>> nb;
    for (size_t j = 0; j < s_.basis.size(); ++j) {
        if (j == k) continue;
        auto v = s_.basis[j];
        Rational f = v[i] / di;
        for (size_t t = 0; t < v.size(); ++t) v[t] -= f * dir[t];
        nb.push_back(std::move(v));
    }
    Rational f = s_.particular[i] / di;
    for (size_t t = 0; t < s_.particular.size(); ++t)
        s_.particular[t] -= f * dir[t];
    s_.basis = std::move(nb);
    return true;
}

std::vector<Rational> AffineSpace::point() const { return s_.particular; }

std::optional<std::vector<Rational>> AffineSpace::root_point(uint32_t i) const {
    if (s_.basis.size() != 1 || is_zero(s_.basis[0][i])) return std::nullopt;
    const Rational t = -s_.particular[i] / s_.basis[0][i];
    auto pt = s_.particular;
    for (size_t k = 0; k < pt.size(); ++k) pt[k] += t * s_.basis[0][k];
    return pt;
}

}  // namespace lfint

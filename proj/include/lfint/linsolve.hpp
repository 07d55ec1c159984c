#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lfint/rational.hpp"

namespace lfint {

// One affine equation: sum_i coeff[i] * u_i + constant = 0.
struct LinEq {
    std::map<uint32_t, Rational> coeff;
    Rational constant;

    void add(uint32_t u, const Rational& c) {
        auto [it, fresh] = coeff.try_emplace(u, c);
        if (!fresh) {
            it->second += c;
            if (is_zero(it->second)) coeff.erase(it);
        }
    }
};

struct LinearSystem {
    uint32_t num_unknowns = 0;
    std::vector<LinEq> equations;
};

// Solution set of a consistent system: particular + span(basis). The
// particular point is the canonical one with all free unknowns set to 0.
struct AffineSolution {
    std::vector<Rational> particular;
    std::vector<std::vector<Rational>> basis;

    size_t dimension() const { return basis.size(); }
    std::vector<Rational> point(const std::vector<Rational>& params) const;
};

// Exact elimination with integer cross-multiplication rows (divisions
// deferred to a content strip per row), deterministic sparsity-guided
// pivoting, then rational back-substitution. nullopt = inconsistent.
std::optional<AffineSolution> solve_linear(const LinearSystem& sys);

// An affine subspace of Q^n that can be interactively constrained; used to
// pick canonical points (e.g. zero as many chosen coordinates as feasible).
class AffineSpace {
  public:
    explicit AffineSpace(AffineSolution s) : s_(std::move(s)) {}

    size_t dimension() const { return s_.basis.size(); }
    // Value of coordinate i as (constant, gradient over current parameters).
    bool coordinate_is_fixed(uint32_t i, Rational* value) const;
    // Try to impose coordinate i == 0. Returns false (and leaves the space
    // unchanged) when the coordinate is a nonzero constant on the space.
    bool constrain_zero(uint32_t i);
    // Canonical point: remaining parameters set to 0.
    std::vector<Rational> point() const;
    // On a one-dimensional space, the unique point where coordinate i
    // vanishes; nullopt if coordinate i is constant (or dimension != 1).
    std::optional<std::vector<Rational>> root_point(uint32_t i) const;
    const AffineSolution& solution() const { return s_; }

  private:
    AffineSolution s_;
};

}  // namespace lfint

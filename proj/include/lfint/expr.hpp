#pragma once

#include <string>
#include <variant>

#include "lfint/ratfn.hpp"

namespace lfint {

// Raised with the byte offset of the offending token and what was expected.
struct ParseError : std::runtime_error {
    size_t position;
    ParseError(size_t pos, const std::string& expected)
        : std::runtime_error("parse error at position " + std::to_string(pos) +
                             ": expected " + expected),
          position(pos) {}
};

struct DegenerateOde : std::runtime_error {
    DegenerateOde() : std::runtime_error("ode denominator is identically zero") {}
};

// Grammar (see docs/grammar.md): integer literals, variables x y z,
// binary + - * /, parenthesized subexpressions, ^ with nonnegative integer
// exponents, unary minus binding looser than ^ and tighter than *.
// No implicit multiplication.
std::variant<Poly, RatFn> parse_expression(const std::string& text);

// Convenience: always as a rational function.
RatFn parse_ratfn(const std::string& text);

// Canonical printer; parse_expression(format_expression(v)) == v and the
// output is byte-deterministic. Terms print in descending graded-lex order.
std::string format_expression(const Poly& p);
std::string format_expression(const RatFn& f);

// Second-order ODE z' = M0/N0 in the reduced variables (x, y, z=y').
// Invariants: gcd(M0, N0) = 1; N0 not identically zero; N0 primitive with
// positive leading coefficient (graded-lex).
struct Ode2 {
    Poly m0, n0;

    Ode2() : m0(), n0(1) {}
    explicit Ode2(const RatFn& phi) : m0(phi.num()), n0(phi.den()) {}

    RatFn phi() const { return RatFn(m0, n0); }
};

// Parses the right-hand side expression of z' = phi(x,y,z).
// Throws ParseError or DegenerateOde (division by a zero polynomial).
Ode2 parse_ode2(const std::string& rhs);

}  // namespace lfint

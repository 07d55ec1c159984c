#include "lfint/expr.hpp"

namespace lfint {

namespace {

std::string monomial_str(const Monomial& m) {
    std::string out;
    auto piece = [&](char name, int32_t e) {
        if (e == 0) return;
        if (!out.empty()) out += '*';
        out += name;
        if (e != 1) out += "^" + std::to_string(e);
    };
    piece('x', m.ex);
    piece('y', m.ey);
    piece('z', m.ez);
    return out;
}

// |c| * m with the sign handled by the caller.
std::string term_str(const Rational& c, const Monomial& m) {
    Rational a = abs(c);
    if (m.is_unit()) return to_string(a);
    if (a == 1) return monomial_str(m);
    return to_string(a) + "*" + monomial_str(m);
}

// True when `p` can stand unparenthesized as a denominator: a single pure
// power of one variable with coefficient 1 ("x", "z^3").
bool bare_denominator(const Poly& p) {
    if (p.term_count() != 1) return false;
    const auto& [m, c] = *p.terms().begin();
    if (c != 1) return false;
    int nonzero = (m.ex > 0) + (m.ey > 0) + (m.ez > 0);
    return nonzero == 1;
}

bool bare_numerator(const Poly& p) {
    return p.term_count() == 1 && sgn(p.terms().begin()->second) > 0;
}

}  // namespace

std::string format_expression(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {  // descending graded-lex
        if (first) {
            if (sgn(c) < 0) out += '-';
            out += term_str(c, m);
            first = false;
        } else {
            out += sgn(c) < 0 ? " - " : " + ";
            out += term_str(c, m);
        }
    }
    return out;
}

std::string format_expression(const RatFn& f) {
    if (f.is_poly()) return format_expression(f.num());
    std::string n = format_expression(f.num());
    if (!bare_numerator(f.num())) n = "(" + n + ")";
    std::string d = format_expression(f.den());
    if (!bare_denominator(f.den())) d = "(" + d + ")";
    return n + "/" + d;
}

}  // namespace lfint

#include <cctype>

#include "lfint/expr.hpp"

namespace lfint {

namespace {

// Recursive-descent parser over RatFn values.
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | power
//   power  := primary ('^' exponent)?
//   primary:= integer | 'x' | 'y' | 'z' | '(' expr ')'
//   exponent := integer | '(' integer ')'
class Parser {
  public:
    // In ode mode a zero divisor raises DegenerateOde instead of ParseError
    // (the denominator of the equation is identically zero).
    Parser(const std::string& s, bool ode_mode)
        : s_(s), ode_mode_(ode_mode) {}

    RatFn parse() {
        RatFn v = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError(pos_, "end of input");
        return v;
    }

  private:
    const std::string& s_;
    bool ode_mode_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(pos_, what);
    }

    RatFn expr() {
        RatFn v = term();
        while (true) {
            if (accept('+'))
                v += term();
            else if (accept('-'))
                v -= term();
            else
                return v;
        }
    }

    RatFn term() {
        RatFn v = factor();
        while (true) {
            if (accept('*'))
                v *= factor();
            else if (accept('/')) {
                size_t at = pos_;
                RatFn d = factor();
                if (d.is_zero()) {
                    if (ode_mode_) throw DegenerateOde();
                    throw ParseError(at, "nonzero divisor");
                }
                v /= d;
            } else
                return v;
        }
    }

    RatFn factor() {
        if (accept('-')) return -factor();
        return power();
    }

    RatFn power() {
        RatFn base = primary();
        if (accept('^')) {
            uint32_t e = exponent_literal();
            // Exponentiation of a general rational value: num^e / den^e.
            return RatFn(base.num().pow(e), base.den().pow(e));
        }
        return base;
    }

    uint32_t exponent_literal() {
        bool parens = accept('(');
        skip_ws();
        size_t start = pos_;
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw ParseError(pos_, "nonnegative integer exponent");
        Int v = integer_literal();
        if (v > 4096) throw ParseError(start, "exponent <= 4096");
        if (parens) expect(')', "')'");
        return static_cast<uint32_t>(v.get_ui());
    }

    Int integer_literal() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return Int(s_.substr(start, pos_ - start));
    }

    RatFn primary() {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) return RatFn(Rational(integer_literal()));
        if (c == 'x' || c == 'y' || c == 'z') {
            ++pos_;
            Var v = c == 'x' ? Var::x : (c == 'y' ? Var::y : Var::z);
            return RatFn(Poly::variable(v));
        }
        if (c == '(') {
            ++pos_;
            RatFn v = expr();
            expect(')', "')'");
            return v;
        }
        throw ParseError(pos_, "integer, variable, or '('");
    }
};

}  // namespace

RatFn parse_ratfn(const std::string& text) {
    return Parser(text, /*ode_mode=*/false).parse();
}

std::variant<Poly, RatFn> parse_expression(const std::string& text) {
    RatFn v = parse_ratfn(text);
    if (v.is_poly()) {
        // Fold the (constant) denominator into the polynomial.
        Poly p = v.num();
        p.mul_scalar(Rational(1) / v.den().constant_value());
        return p;
    }
    return v;
}

Ode2 parse_ode2(const std::string& rhs) {
    return Ode2(Parser(rhs, /*ode_mode=*/true).parse());
}

}  // namespace lfint

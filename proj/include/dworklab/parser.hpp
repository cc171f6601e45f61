#pragma once

#include "polynomial.hpp"

#include <cctype>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dworklab {

struct ParseError : std::runtime_error {
    std::size_t line, column;
    ParseError(const std::string& what, std::size_t l, std::size_t c)
        : std::runtime_error(what + " at line " + std::to_string(l) + ", column " + std::to_string(c)),
          line(l), column(c) {}
};
struct SyntaxError : ParseError {
    using ParseError::ParseError;
};
struct ZeroDenominator : ParseError {
    using ParseError::ParseError;
};
struct VariableIndexZero : ParseError {
    using ParseError::ParseError;
};

struct FormSource {
    std::string text;
    std::optional<std::size_t> n;
};

namespace detail {

// form := signed_term (('+'|'-') term)*
// term := [coeff '*'] mono | coeff
// coeff := int ['/' posint] | '(' '-' coeff ')'
// mono := var ('*' var)*
// var := 'x' posint ['^' posint]
class FormParser {
public:
    explicit FormParser(const std::string& s) : s_(s) {}

    struct RawTerm {
        Rational coeff;
        std::map<std::size_t, std::uint32_t> powers;
    };

    std::vector<RawTerm> parse() {
        std::vector<RawTerm> terms;
        skip_ws();
        bool neg = false;
        if (peek() == '+' || peek() == '-') {
            neg = get() == '-';
            skip_ws();
        }
        terms.push_back(term(neg));
        for (;;) {
            skip_ws();
            if (at_end()) break;
            char c = peek();
            if (c != '+' && c != '-') fail("expected '+' or '-'");
            get();
            skip_ws();
            terms.push_back(term(c == '-'));
        }
        return terms;
    }

private:
    RawTerm term(bool neg) {
        RawTerm t{Rational(1), {}};
        if (peek() == 'x') {
            mono(t);
        } else {
            t.coeff = coeff();
            skip_ws();
            if (peek() == '*') {
                get();
                skip_ws();
                if (peek() != 'x') fail("expected variable");
                mono(t);
            }
        }
        if (neg) t.coeff = -t.coeff;
        return t;
    }

    Rational coeff() {
        if (peek() == '(') {
            get();
            skip_ws();
            if (peek() != '-') fail("expected '-' after '('");
            get();
            skip_ws();
            Rational v = coeff();
            skip_ws();
            if (peek() != ')') fail("expected ')'");
            get();
            return -v;
        }
        Integer num = integer("expected coefficient");
        skip_ws();
        Integer den = 1;
        if (peek() == '/') {
            get();
            skip_ws();
            std::size_t l = line_, c = col_;
            den = integer("expected denominator");
            if (den == 0) throw ZeroDenominator("zero denominator", l, c);
        }
        return make_rational(num, den);
    }

    void mono(RawTerm& t) {
        var(t);
        for (;;) {
            std::size_t save_pos = pos_, save_line = line_, save_col = col_;
            skip_ws();
            if (peek() == '*') {
                get();
                skip_ws();
                var(t);
            } else {
                pos_ = save_pos;
                line_ = save_line;
                col_ = save_col;
                return;
            }
        }
    }

    void var(RawTerm& t) {
        if (peek() != 'x') fail("expected variable");
        get();
        std::size_t l = line_, c = col_;
        Integer idx = integer("expected variable index");
        if (idx == 0) throw VariableIndexZero("variable index 0", l, c);
        if (!idx.fits_ulong_p() || idx > 1000000) fail("variable index too large");
        std::uint32_t e = 1;
        std::size_t save_pos = pos_, save_line = line_, save_col = col_;
        skip_ws();
        if (peek() == '^') {
            get();
            skip_ws();
            Integer p = integer("expected exponent");
            if (p == 0) fail("exponent must be positive");
            if (!p.fits_uint_p() || p > 100000) fail("exponent too large");
            e = static_cast<std::uint32_t>(p.get_ui());
        } else {
            pos_ = save_pos;
            line_ = save_line;
            col_ = save_col;
        }
        t.powers[idx.get_ui()] += e;
    }

    Integer integer(const char* what) {
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(what);
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(peek()))) digits += get();
        return Integer(digits);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }
    char get() {
        char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }
    [[noreturn]] void fail(const std::string& what) {
        std::string found = at_end() ? "end of input" : std::string("'") + peek() + "'";
        throw SyntaxError(what + ", found " + found, line_, col_);
    }

    const std::string& s_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

}  // namespace detail

inline Form parse_form(const FormSource& src) {
    detail::FormParser p(src.text);
    auto raw = p.parse();
    std::size_t maxidx = 0;
    for (const auto& t : raw)
        for (const auto& [i, e] : t.powers) maxidx = std::max(maxidx, i);
    std::size_t n = src.n.value_or(std::max<std::size_t>(maxidx, 1));
    if (maxidx > n)
        throw std::invalid_argument("variable x" + std::to_string(maxidx) + " exceeds declared count " +
                                    std::to_string(n));
    Form f(n);
    for (const auto& t : raw) {
        ExponentVec e(n);
        for (const auto& [i, p] : t.powers) e[i - 1] = p;
        f.add_term(e, t.coeff);
    }
    return f;
}

inline Form parse_form(const std::string& text, std::optional<std::size_t> n = std::nullopt) {
    return parse_form(FormSource{text, n});
}

namespace detail {
inline std::string monomial_text(const ExponentVec& e) {
    std::string out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!e[i]) continue;
        if (!out.empty()) out += "*";
        out += "x" + std::to_string(i + 1);
        if (e[i] > 1) out += "^" + std::to_string(e[i]);
    }
    return out;
}

template <class Poly, class CoeffText>
std::string print_terms(const Poly& f, CoeffText coeff_text) {
    if (f.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : f.terms()) {
        auto [negative, magnitude] = coeff_text(c);
        std::string mono = monomial_text(e);
        std::string body;
        if (mono.empty()) body = magnitude;
        else if (magnitude == "1") body = mono;
        else body = magnitude + "*" + mono;
        if (first) out += (negative ? "-" : "") + body;
        else out += (negative ? " - " : " + ") + body;
        first = false;
    }
    return out;
}
}  // namespace detail

inline std::string print_form(const Form& f) {
    return detail::print_terms(f, [](const Rational& c) {
        Rational a = abs(c);
        return std::pair<bool, std::string>(sgn(c) < 0, a.get_str());
    });
}

// Residues printed in [0, q); re-parses over Q to the integer lift.
inline std::string print_form(const FieldPoly& f) {
    return detail::print_terms(f, [](const FieldElem& c) {
        return std::pair<bool, std::string>(false, std::to_string(c.residue));
    });
}

inline std::ostream& operator<<(std::ostream& os, const Form& f) { return os << print_form(f); }
inline std::ostream& operator<<(std::ostream& os, const FieldPoly& f) { return os << print_form(f); }

}  // namespace dworklab

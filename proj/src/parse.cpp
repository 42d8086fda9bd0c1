#include "bisyz/parse.hpp"

#include <cctype>
#include <limits>

namespace bisyz {
namespace {

class Parser {
public:
    Parser(std::string_view text, Ring ring, int line, int column)
        : text_(text), ring_(ring), line_(line), column_(column) {}

    Poly<Rational> run() {
        Poly<Rational> p = poly();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(line_, column_ + static_cast<int>(pos_), what);
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Poly<Rational> poly() {
        bool negate = false;
        if (accept('-'))
            negate = true;
        else
            accept('+');
        Poly<Rational> acc = term();
        if (negate) acc = -acc;
        for (;;) {
            if (accept('+'))
                acc += term();
            else if (accept('-'))
                acc -= term();
            else
                return acc;
        }
    }

    Poly<Rational> term() {
        Poly<Rational> acc = factor();
        while (accept('*')) acc *= factor();
        return acc;
    }

    Poly<Rational> factor() {
        char c = peek();
        Poly<Rational> base(ring_);
        if (c == '(') {
            ++pos_;
            base = poly();
            if (!accept(')')) fail("expected ')'");
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            mpz_class num(digits());
            mpz_class den = 1;
            if (accept('/')) {
                if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected denominator");
                den = mpz_class(digits());
                if (den == 0) fail("zero denominator");
            }
            Rational q(num, den);
            q.canonicalize();
            base = Poly<Rational>(ring_, q);
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            std::string_view name = text_.substr(start, pos_ - start);
            const auto& names = var_names(ring_);
            int index = -1;
            for (int i = 0; i < 4; ++i)
                if (names[i] == name) index = i;
            if (index < 0) {
                pos_ = start;
                fail("unknown variable '" + std::string(name) + "'");
            }
            base = Poly<Rational>::variable(ring_, index, Rational(1));
        } else if (c == '\0') {
            fail("unexpected end of input");
        } else {
            fail("unexpected '" + std::string(1, c) + "'");
        }
        if (accept('^')) {
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
            std::size_t at = pos_;
            std::string e = digits();
            if (e.size() > 4) {
                pos_ = at;
                fail("exponent too large");
            }
            base = pow(base, std::stoi(e), Rational(1));
        }
        return base;
    }

    std::string digits() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string_view text_;
    Ring ring_;
    int line_;
    int column_;
    std::size_t pos_ = 0;
};

}  // namespace

Poly<Rational> parse_polynomial(std::string_view text, Ring ring, int line, int column) {
    try {
        return Parser(text, ring, line, column).run();
    } catch (const std::overflow_error& e) {
        throw ParseError(line, column, e.what());
    }
}

}  // namespace bisyz

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "bisyz/poly.hpp"

namespace bisyz {

/// Input error with a 1-based source position.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parses `poly := term (('+'|'-') term)*` over the variables of `ring`.
/// `line` and `column` locate text[0] in the enclosing file for error
/// messages.
Poly<Rational> parse_polynomial(std::string_view text, Ring ring, int line = 1, int column = 1);

}  // namespace bisyz

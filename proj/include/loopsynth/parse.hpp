#pragma once

#include "loopsynth/polynomial.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace loopsynth {

/// Thrown for malformed text; carries a 1-based line/column position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Maps an identifier to a variable. Implementations throw (typically a
/// ParseError via `fail`) for unknown names.
using Resolver = std::function<Var(const std::string& name)>;

/// Resolver that accepts every identifier as a program variable, ranked by
/// first appearance.
Resolver free_resolver();

/// Grammar: integer/decimal literals, identifiers, + - * / ^, parentheses and
/// juxtaposition as multiplication ("3x(x - 1)", "1/2 a0"). Division is only
/// allowed by nonzero constants; exponents are nonnegative integer literals.
/// An identifier the resolver rejects is retried as a product of names it
/// accepts ("xz" as x*z).
/// `line` is used for error positions.
Polynomial parse_polynomial(std::string_view text, const Resolver& resolve, std::size_t line = 1);

/// "lhs == rhs && p2 == q2 && p3": each conjunct yields lhs - rhs (a bare
/// expression p stands for p == 0).
std::vector<Polynomial> parse_conjunction(std::string_view text, const Resolver& resolve, std::size_t line = 1);

}  // namespace loopsynth

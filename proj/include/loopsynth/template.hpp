#pragma once

#include "loopsynth/matrix.hpp"
#include "loopsynth/symbols.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace loopsynth {

/// Multiplicities m_1 >= ... >= m_t of the symbolic roots.
struct IntegerPartition {
  std::vector<unsigned> parts;

  unsigned sum() const;
  /// "2,1"
  std::string to_string() const;
  /// Parses "2,1" (order-insensitive); throws std::invalid_argument.
  static IntegerPartition parse(const std::string& text);
  friend bool operator==(const IntegerPartition&, const IntegerPartition&) = default;
};

/// All partitions of s, [s] first, then descending lexicographic.
std::vector<IntegerPartition> int_partitions(unsigned s);

enum class ShapeTier : std::uint8_t { UnitUpperTriangular, UpperTriangular, Full };

const char* to_string(ShapeTier tier);
/// "un", "up", "fu"; throws std::invalid_argument.
ShapeTier parse_tier(const std::string& text);

struct RootSpec {
  std::vector<std::pair<Var, unsigned>> roots;
};

/// Finite sum of w^n * u with w a monomial over root symbols (the unit
/// monomial stands for 1^n) and u a polynomial in n and non-root symbols.
class ExpPolynomial {
 public:
  using TermMap = std::map<Monomial, Polynomial, GrlexDescending>;

  ExpPolynomial() = default;
  explicit ExpPolynomial(const Polynomial& u) { add(Monomial(), u); }
  ExpPolynomial(const Monomial& w, const Polynomial& u) { add(w, u); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  ExpPolynomial& operator+=(const ExpPolynomial& other);
  friend ExpPolynomial operator+(ExpPolynomial a, const ExpPolynomial& b) { return a += b; }
  friend ExpPolynomial operator*(const ExpPolynomial& a, const ExpPolynomial& b);
  ExpPolynomial scaled(const Polynomial& factor) const;

  /// Value at a concrete index: sum w^k * u(k), a polynomial over the
  /// remaining symbols.
  Polynomial at(unsigned k, const Var& counter) const;

  std::string to_string() const;

 private:
  void add(const Monomial& w, const Polynomial& u);
  TermMap terms_;
};

/// Replaces the variables of p by exponential polynomials; unbound variables
/// stay as constant (w = 1) factors.
ExpPolynomial substitute_exp(const Polynomial& p, const std::map<Var, ExpPolynomial>& bindings);

/// Initial values are A * Xhat with Xhat = (params..., 1). Each parameter is
/// bound to the row of the variable whose initial value it denotes.
struct ParamSpec {
  /// Index of a parameter that is not the initial value of any variable.
  static constexpr std::size_t kUnbound = static_cast<std::size_t>(-1);
  std::vector<Var> params;
  std::vector<std::size_t> indices;
};

struct TemplateOptions {
  ShapeTier tier = ShapeTier::Full;
  IntegerPartition partition;
  /// Initial values fixed to rationals, by variable index.
  std::map<std::size_t, Rational> pinned_inits;
  std::optional<ParamSpec> params;
  /// Rows of B fixed to the unit row (the variable never changes).
  std::vector<std::size_t> constant_rows;
  /// User symbols standing for x_i(0), by variable index.
  std::map<Var, std::size_t> initial_symbols;
};

struct RecurrenceTemplate {
  std::size_t size = 0;
  std::vector<Var> vars;
  ShapeTier tier = ShapeTier::Full;
  IntegerPartition partition;
  SymMatrix b;
  /// s x (r+1)
  SymMatrix a;
  std::vector<Var> params;
  /// (params..., 1) as a column
  SymMatrix xhat;
  /// a * xhat; the initial value of every variable
  SymMatrix initial;
  std::map<Var, std::size_t> initial_symbols;
  RootSpec roots;
  Var counter;
  /// Indeterminate of the characteristic polynomial.
  Var char_var;
  /// coeff_blocks[j][k] is the s x (r+1) coefficient matrix of w_j^n n^k.
  std::vector<std::vector<SymMatrix>> coeff_blocks;
  /// Closed form per variable.
  std::vector<ExpPolynomial> closed_form;
  SymbolTable symbols;

  bool parameterized() const { return !params.empty(); }
  /// Symbolic entries of B.
  std::vector<Var> b_unknowns() const;
  /// Symbolic entries of A.
  std::vector<Var> a_unknowns() const;
  std::vector<Var> root_symbols() const;
  std::vector<Var> coeff_symbols() const;
  /// Closed form evaluated at index k, as an s x 1 column.
  SymMatrix closed_form_at(unsigned k) const;
};

/// Builds B, A, the root specification and the general closed form. `session`
/// must already contain the user symbols; generated symbols are added to the
/// template's own copy. Throws std::invalid_argument on dimension mismatch or
/// out-of-range indices.
RecurrenceTemplate build_template(const SymbolTable& session, const std::vector<Var>& vars,
                                  const TemplateOptions& options);

/// Companion matrix of x(n+r) + c_{r-1} x(n+r-1) + ... + c_0 x(n) = 0, given
/// the coefficients c_0..c_r lowest first (c_r is normalized to 1). The state
/// is (x(n), ..., x(n+r-1)). Throws std::invalid_argument when r < 1, the
/// leading coefficient is 0 or the trailing coefficient c_0 is 0.
SymMatrix companion_embedding(const std::vector<Rational>& coeffs);

}  // namespace loopsynth

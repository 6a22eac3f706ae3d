#pragma once

#include "loopsynth/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace loopsynth {

enum class VarKind : std::uint8_t {
  Program,      // loop variable x_i
  Initial,      // user symbol standing for x_i(0)
  Param,        // universally quantified initial value
  Root,         // symbolic eigenvalue
  MatrixEntry,  // entry of the update matrix B
  InitEntry,    // entry of the initial-value matrix A
  Coeff,        // closed-form coefficient
  Counter,      // the iteration counter n of closed forms
  Aux,          // scratch indeterminates (the char-poly variable, ...)
};

const char* to_string(VarKind kind);

/// True for kinds that are declared by the user rather than generated.
constexpr bool is_user_kind(VarKind kind) {
  return kind == VarKind::Program || kind == VarKind::Initial || kind == VarKind::Param;
}

/// A named indeterminate. Variables are ordered globally: user variables come
/// first in declaration order (rank), generated symbols follow alphabetically.
/// Two Vars are the same indeterminate iff name, rank class and name agree;
/// the session symbol table guarantees one Var per name.
struct Var {
  std::string name;
  VarKind kind = VarKind::Aux;
  int rank = 0;

  Var() = default;
  Var(std::string n, VarKind k, int r = 0);

  bool generated() const { return !is_user_kind(kind); }

  friend bool operator==(const Var& a, const Var& b) {
    return a.generated() == b.generated() && a.rank == b.rank && a.name == b.name;
  }
  friend std::strong_ordering operator<=>(const Var& a, const Var& b);
};

/// Power product of variables. Exponents are positive; the vector is sorted by
/// the global variable order.
class Monomial {
 public:
  using Factor = std::pair<Var, unsigned>;

  Monomial() = default;
  explicit Monomial(const Var& v, unsigned exponent = 1);
  /// Factors may be unsorted and may repeat a variable; zero exponents vanish.
  static Monomial from_factors(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  unsigned degree() const;
  unsigned degree_in(const Var& v) const;
  bool contains(const Var& v) const { return degree_in(v) > 0; }

  Monomial operator*(const Monomial& other) const;
  Monomial pow(unsigned e) const;
  /// True when `other` divides this monomial.
  bool divisible_by(const Monomial& other) const;
  /// Requires divisible_by(other).
  Monomial operator/(const Monomial& other) const;
  /// Splits off the factor of `v`: returns (exponent of v, remaining monomial).
  std::pair<unsigned, Monomial> split(const Var& v) const;

  std::string to_string() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Graded lexicographic comparison: true when a is strictly greater than b.
bool grlex_greater(const Monomial& a, const Monomial& b);

struct GrlexDescending {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_greater(a, b); }
};

/// Multivariate polynomial with exact rational coefficients. Terms are kept
/// in descending graded lexicographic order and zero coefficients are never
/// stored, so structural equality is mathematical equality.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexDescending>;

  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT(google-explicit-constructor)
  Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Polynomial(int c) : Polynomial(Rational(c)) {}   // NOLINT(google-explicit-constructor)
  Polynomial(const Var& v);  // NOLINT(google-explicit-constructor)
  Polynomial(const Monomial& m, const Rational& c);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Coefficient of the unit monomial.
  Rational constant_term() const;
  Rational coefficient(const Monomial& m) const;
  /// Leading (grlex-greatest) term; requires !is_zero().
  const std::pair<const Monomial, Rational>& leading_term() const { return *terms_.begin(); }

  std::set<Var> variables() const;
  bool contains(const Var& v) const;
  unsigned degree_in(const Var& v) const;
  /// Total degree; -1 for the zero polynomial.
  int total_degree() const;
  /// Largest total degree restricted to the given variables.
  unsigned degree_in(const std::set<Var>& vars) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);
  Polynomial& operator*=(long c) { return *this *= Rational(c); }
  Polynomial& operator*=(int c) { return *this *= Rational(c); }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(Polynomial a, long c) { return a *= c; }
  friend Polynomial operator*(Polynomial a, int c) { return a *= c; }
  Polynomial operator-() const;
  Polynomial pow(unsigned e) const;

  /// Exact quotient; throws std::domain_error when `divisor` does not divide.
  Polynomial divide_exact(const Polynomial& divisor) const;

  /// Simultaneous substitution; unbound variables pass through.
  Polynomial substitute(const std::map<Var, Polynomial>& bindings) const;
  /// Full evaluation; throws std::out_of_range if a variable is unbound.
  Rational evaluate(const std::map<Var, Rational>& values) const;

  /// (degree, coefficient) pairs with p = sum coeff_k * v^k, sorted by degree,
  /// zero coefficients omitted. Coefficients are free of v.
  std::vector<std::pair<unsigned, Polynomial>> coeffs_in(const Var& v) const;

  /// Makes the leading coefficient positive (multiplies by -1 if needed).
  Polynomial sign_normalized() const;

  std::string to_string() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void add_term(const Monomial& m, const Rational& c);
  TermMap terms_;
};

/// Canonical total order on polynomials (by term sequence), for use as set keys.
bool poly_less(const Polynomial& a, const Polynomial& b);

/// Reassembles sum coeff_k * v^k.
Polynomial reassemble(const std::vector<std::pair<unsigned, Polynomial>>& coeffs, const Var& v);

}  // namespace loopsynth

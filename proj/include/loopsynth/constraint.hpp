#pragma once

#include "loopsynth/polynomial.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace loopsynth {

enum class Rel : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(Rel rel);

/// `lhs rel 0`. Equalities and disequalities are scaled to primitive integer
/// coefficients with a positive leading coefficient; order relations are only
/// scaled by positive factors.
struct Atom {
  Polynomial lhs;
  Rel rel = Rel::Eq;

  Atom() = default;
  Atom(Polynomial p, Rel r);

  /// Exact truth value under a rational assignment of all its variables.
  bool holds(const std::map<Var, Rational>& values) const;
  /// Truth value of a constant atom; requires lhs.is_constant().
  bool holds_constant() const;

  std::string to_string() const;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Where a clause came from. Used for grouping and for core labels.
enum class ClauseGroup : std::uint8_t { Roots, Coeff, Init, Alg, NonTrivial, Partition, Block, User };

const char* to_string(ClauseGroup group);

/// Disjunction of atoms. A unit clause has exactly one disjunct.
struct Clause {
  std::vector<Atom> disjuncts;
  bool soft = false;
  ClauseGroup group = ClauseGroup::User;

  Clause() = default;
  Clause(std::vector<Atom> atoms, ClauseGroup g = ClauseGroup::User, bool is_soft = false);
  static Clause eq(Polynomial p, ClauseGroup g = ClauseGroup::User);
  static Clause ne(Polynomial p, ClauseGroup g = ClauseGroup::User);

  bool is_unit() const { return disjuncts.size() == 1; }
  bool is_unit_equality() const { return is_unit() && disjuncts.front().rel == Rel::Eq; }
  bool holds(const std::map<Var, Rational>& values) const;
  std::set<Var> variables() const;
  std::string to_string() const;

  /// Structural identity ignoring group and softness.
  friend bool same_constraint(const Clause& a, const Clause& b) { return a.disjuncts == b.disjuncts; }
};

/// Primitive integer form of p with a positive leading coefficient.
Polynomial primitive_part(const Polynomial& p);

/// Replaces every unit equality p = 0 by the equalities q = 0 for all
/// coefficients q of p with respect to the monomials in `vars`; every other
/// clause passes through unchanged. Zero coefficients are dropped and
/// duplicate clauses removed (first occurrence wins).
std::vector<Clause> decompose(const std::vector<Clause>& clauses, const std::vector<Var>& vars);

/// Coefficient polynomials of p with respect to the monomials in `vars`.
std::vector<Polynomial> decompose_polynomial(const Polynomial& p, const std::vector<Var>& vars);

}  // namespace loopsynth

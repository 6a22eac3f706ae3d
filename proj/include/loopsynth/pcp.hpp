#pragma once

#include "loopsynth/constraint.hpp"
#include "loopsynth/template.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopsynth {

/// Raised when an invariant can never hold (a nonzero constant).
class UnsatisfiableInvariant : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// sum_i w_i^n u_i = 0 with syntactically distinct w_i.
struct CFiniteConstraint {
  std::vector<std::pair<Monomial, Polynomial>> terms;

  std::size_t length() const { return terms.size(); }
  /// sum_i w_i^j u_i
  Polynomial instance(unsigned j) const;
  std::string to_string() const;
};

struct Pcp {
  std::vector<Clause> clauses;
  SymbolTable symbols;
  /// Universally quantified symbols that were decomposed away.
  std::vector<Var> params;

  /// Adds a clause unless an identical one is present. Constant atoms are
  /// folded: a clause with a true constant atom is dropped, false constant
  /// atoms are removed, and a clause left empty becomes 1 = 0.
  void add(Clause clause);
  void add_all(const std::vector<Clause>& more);
  /// Every symbol occurring in some clause, in variable order.
  std::vector<Var> unknowns() const;
  std::size_t count(ClauseGroup group) const;
  /// Deterministic JSON debug dump.
  std::string to_json() const;

 private:
  std::set<std::string> keys_;
};

std::vector<Clause> gen_roots(const RecurrenceTemplate& tpl);
std::vector<Clause> gen_coeff(const RecurrenceTemplate& tpl);
std::vector<Clause> gen_init(const RecurrenceTemplate& tpl);

struct AlgConstraints {
  std::vector<Clause> clauses;
  std::vector<CFiniteConstraint> cfinite;
};

/// Substitutes closed forms for the program variables and initial values for
/// the initial symbols, splits by powers of n and instantiates each part at
/// n = 0..l-1. Throws std::invalid_argument for unknown variables and
/// UnsatisfiableInvariant for a nonzero constant invariant.
AlgConstraints gen_alg(const RecurrenceTemplate& tpl, const std::vector<Polynomial>& invariants);

/// C_roots, C_coeff, C_init and C_alg of a template without parameters.
Pcp build_pcp(const RecurrenceTemplate& tpl, const std::vector<Polynomial>& invariants);

/// Same union for a parameterized template, decomposed over the parameters.
Pcp build_param_pcp(const RecurrenceTemplate& tpl, const std::vector<Polynomial>& invariants);

}  // namespace loopsynth

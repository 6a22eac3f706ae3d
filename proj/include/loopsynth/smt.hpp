#pragma once

#include "loopsynth/pcp.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace loopsynth {

struct SolverConfig {
  std::string executable = "z3";
  std::vector<std::string> flags{"-in"};
  /// Seconds per query.
  double timeout_seconds = 60;
  bool supports_soft = true;
  bool supports_cores = true;

  /// Defaults overridden by LOOPSYNTH_SOLVER and LOOPSYNTH_SOLVER_FLAGS.
  static SolverConfig from_environment();
  /// z3 keeps "-in" and soft assertions; anything else gets no flags and no soft support.
  static SolverConfig for_executable(const std::string& path);
};

/// A real algebraic number reported by the solver: the `index`-th root of
/// `defining` (a polynomial in x, solver-specific root numbering) inside [lo, hi].
struct AlgebraicTag {
  Polynomial defining;
  unsigned index = 0;
  Rational lo;
  Rational hi;
  bool has_interval = false;

  std::string to_string() const;
};

using ModelValue = std::variant<Rational, AlgebraicTag>;

struct Model {
  std::map<Var, ModelValue> values;

  bool all_rational() const;
  std::optional<Rational> rational(const Var& v) const;
  /// Rational entries only.
  std::map<Var, Rational> rational_values() const;
  std::string to_string() const;
};

enum class SolveStatus { Sat, Unsat, Unknown, Timeout };

const char* to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  Model model;
  /// Some model value is algebraic, so the exact re-check was partial.
  bool inexact = false;
  /// Labels of the clauses in the unsat core (Unsat only).
  std::vector<std::string> core;
  bool has_core = false;
  std::string detail;
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { Process, Protocol, ModelCheck };
  SolverError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Label of the i-th clause in emitted scripts.
std::string clause_label(std::size_t i);

struct EmitOptions {
  /// Attach :named labels (needed for cores).
  bool named = false;
  /// Emit soft clauses as assert-soft; otherwise they are left out.
  bool soft = true;
  /// Append (get-value ...) for every declared symbol.
  bool get_values = false;
  bool get_core = false;
  /// Solver-side timeout in milliseconds (0 = none).
  long timeout_ms = 0;
};

/// Deterministic SMT-LIB 2 script over QF_NRA ending in (check-sat).
std::string emit_smtlib(const Pcp& pcp, const EmitOptions& options = {});

/// SMT-LIB term for p (reals).
std::string smt_term(const Polynomial& p);

/// Re-reads the assertions of an emitted script as clauses (soft ones marked
/// soft). Symbols are resolved through `symbols`.
std::vector<Clause> parse_smtlib_asserts(const std::string& script, const SymbolTable& symbols);

/// Runs one query. On Sat all hard clauses are re-checked by exact evaluation
/// of the rational part of the model; a failing check throws
/// SolverError(ModelCheck).
SolveResult solve(const Pcp& pcp, const SolverConfig& cfg);

struct CFiniteTrace {
  /// 1 when every soft constraint held, 2 when the model-derived partition
  /// worked, 3 when a later partition did.
  int step = 0;
  std::size_t partitions_tried = 0;
  std::size_t partitions_skipped = 0;
  /// Partition over the distinct exponential bases, e.g. "{1,2}{3}".
  std::string partition;
  std::vector<std::string> bases;
};

/// Solves pcp with its C_alg clauses replaced by the C-finite constraints.
/// `pcp.params` are decomposed away from every generated constraint.
SolveResult solve_cfinite(const Pcp& pcp, const std::vector<CFiniteConstraint>& cfcs, const SolverConfig& cfg,
                          CFiniteTrace* trace = nullptr);

/// True iff sum_i ws[i]^n us[i] = 0 for n = 0..l-1. With pairwise distinct
/// ws this happens exactly when every us[i] is 0. Throws
/// std::invalid_argument on duplicate ws or size mismatch.
bool vandermonde_zero_check(const std::vector<Rational>& ws, const std::vector<Rational>& us);

/// Set partitions of {0..l-1} as block-index vectors (restricted growth
/// strings), ordered by decreasing block count, then lexicographically. The
/// callback returns false to stop.
void for_each_set_partition(std::size_t l, const std::function<bool(const std::vector<std::size_t>&)>& fn);

}  // namespace loopsynth

#pragma once

#include "loopsynth/pcp.hpp"
#include "loopsynth/smt.hpp"
#include "loopsynth/verify.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace loopsynth {

/// A parameter, optionally the initial value of a program variable.
struct ParamBinding {
  Var param;
  std::optional<Var> var;
};

struct SynthRequest {
  std::vector<Var> vars;
  std::vector<Polynomial> invariants;
  /// Defaults to the number of variables (plus the constant-one variable).
  std::optional<std::size_t> size;
  /// Adds a variable that stays 1.
  bool aux_one = false;
  std::vector<ShapeTier> tiers{ShapeTier::UnitUpperTriangular, ShapeTier::UpperTriangular, ShapeTier::Full};
  std::optional<IntegerPartition> partition;
  /// Fixed variable order instead of enumerating permutations.
  std::optional<std::vector<Var>> permutation;
  std::vector<ParamBinding> params;
  std::map<Var, Rational> pinned_inits;
  /// Symbol standing for the initial value of a variable.
  std::map<Var, Var> initial_symbols;
  bool avoid_trivial = true;
  std::size_t count = 1;
  double timeout_seconds = 60;
  SolverConfig solver;
};

/// One (tier, variable order, partition) configuration of the search.
struct Cell {
  ShapeTier tier = ShapeTier::Full;
  /// Template variables in order, including generated ones at the end.
  std::vector<Var> order;
  IntegerPartition partition;
  std::string to_string() const;
};

struct CellProblem {
  RecurrenceTemplate tpl;
  Pcp pcp;
  std::vector<CFiniteConstraint> cfinite;
  std::optional<std::size_t> constant_index;
};

struct SynthLoop {
  AffineLoop loop;
  Cell cell;
  int step = 0;
  double millis = 0;
  std::size_t bound = 0;
};

enum class SynthStatus { Found, NotFound, Exhausted };
const char* to_string(SynthStatus status);

struct SynthResult {
  SynthStatus status = SynthStatus::NotFound;
  std::vector<SynthLoop> loops;
  std::size_t cells_tried = 0;
  std::string detail;
};

/// Variables of the template: the user variables followed by extra and
/// constant-one variables. Throws std::invalid_argument for a bad request.
std::vector<Var> template_vars(const SynthRequest& req);

/// Search order: tiers, then variable orders (lexicographic over declaration
/// positions; one order for the full tier), then partitions (only [s] for the
/// unit upper triangular tier).
std::vector<Cell> search_cells(const SynthRequest& req);

CellProblem build_cell(const SynthRequest& req, const Cell& cell);

/// (B A - A)_ij != 0 for some entry: the first iteration changes the state.
std::vector<Clause> nontriviality_clauses(const RecurrenceTemplate& tpl);

/// Excludes the exact B and A of `loop` from the template's solutions.
Clause blocking_clause(const RecurrenceTemplate& tpl, const AffineLoop& loop);

/// Throws std::invalid_argument when a B or A entry is not rational.
AffineLoop loop_from_model(const RecurrenceTemplate& tpl, const Model& model,
                           std::optional<std::size_t> constant_index = std::nullopt);

using CellObserver = std::function<void(const Cell&, const SolveResult&)>;

/// Searches all cells. Every returned loop passed check_invariants; a
/// model that fails it raises std::logic_error. Throws SolverError when the
/// solver process misbehaves.
SynthResult synthesize(const SynthRequest& req, const CellObserver& observer = nullptr);

}  // namespace loopsynth

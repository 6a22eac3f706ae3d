#pragma once

#include "loopsynth/matrix.hpp"
#include "loopsynth/parse.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace loopsynth {

/// X_{n+1} = update * X_n, X_0 = init. Entries may mention parameter symbols
/// but no program variables. Affine updates carry a constant-one state
/// variable at `constant_index` (init 1, row e_k).
struct AffineLoop {
  std::vector<Var> vars;
  SymMatrix update;
  SymMatrix init;
  std::optional<std::size_t> constant_index;
  /// Symbols standing for x_i(0), replaced by init[i] before checking.
  std::map<Var, std::size_t> initial_symbols;

  std::size_t size() const { return vars.size(); }
  /// Program variables without the constant-one carrier.
  std::vector<Var> visible_vars() const;
  std::vector<Var> params() const;
  /// Throws std::invalid_argument on dimension or symbol errors.
  void validate() const;
  /// State after n iterations, computed by exact iteration.
  std::vector<SymMatrix> trace(std::size_t steps) const;
  std::map<Var, Polynomial> bindings(const SymMatrix& state) const;
};

/// Builds a loop from a rational matrix and initial vector.
AffineLoop make_loop(std::vector<Var> vars, SymMatrix update, SymMatrix init);

struct LoopFile {
  std::string name;
  AffineLoop loop;
  /// Text of `invariant` lines, if any.
  std::vector<std::string> invariants;
};

/// Reads the listing syntax
///
///     # name
///     r, q, y = x0, 0, y0
///     while true
///       r = r - q - y
///       q = q + 1
///     end
///
/// Statements run in order; `a, b = e1, e2` inside the body is simultaneous.
/// Identifiers in the initial line that are not loop variables become
/// parameters. The loop guard is ignored. Lines `invariant <conj>` may follow.
LoopFile parse_loop(std::string_view text);

/// Resolver for invariants over the loop's variables and parameters.
Resolver loop_resolver(const AffineLoop& loop);

enum class LoopStyle { Auto, Sequential, Tuple };

/// Renders in the listing syntax. Auto picks a sequential order when one
/// exists (no statement reads a variable already overwritten), else a single
/// tuple assignment.
std::string render_loop(const AffineLoop& loop, LoopStyle style = LoopStyle::Auto, const std::string& name = "");

/// Statement order for sequential rendering, if any.
std::optional<std::vector<std::size_t>> sequential_order(const AffineLoop& loop);

}  // namespace loopsynth

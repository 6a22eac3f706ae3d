#pragma once

#include "loopsynth/loop.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace loopsynth {

using ConcreteSystem = AffineLoop;

struct Witness {
  std::size_t n = 0;
  /// Value of p at iteration n; a nonzero polynomial in the parameters.
  Polynomial value;
};

struct Verdict {
  bool holds = true;
  std::optional<Witness> witness;
  std::size_t bound_used = 0;
};

/// Sum over the monomials of p of s^(degree in `sequence`). At least 1.
std::size_t order_bound(const Polynomial& p, const std::set<Var>& sequence, std::size_t s);

/// Decides p = 0 for all iterations by exact unrolling up to the order bound.
/// Parameters stay symbolic, so holds means p vanishes identically. Throws
/// std::invalid_argument for symbols that are neither loop variables,
/// initial symbols nor parameters.
Verdict check_invariant(const ConcreteSystem& sys, const Polynomial& p);

/// Conjunction; the witness is the earliest failing iteration over all conjuncts.
Verdict check_invariants(const ConcreteSystem& sys, const std::vector<Polynomial>& ps);

/// `rename` maps the variables of p (as variables of `a`) to variables of `b`.
/// Throws std::invalid_argument if it is not injective or misses a variable.
bool check_equiv_modulo(const ConcreteSystem& a, const ConcreteSystem& b, const Polynomial& p,
                        const std::map<Var, Var>& rename);

}  // namespace loopsynth

#include "loopsynth/verify.hpp"

#include <stdexcept>

namespace loopsynth {

std::size_t order_bound(const Polynomial& p, const std::set<Var>& sequence, std::size_t s) {
  std::size_t total = 0;
  for (const auto& [m, c] : p.terms()) {
    unsigned d = 0;
    for (const auto& [v, e] : m.factors()) {
      if (sequence.count(v) != 0) d += e;
    }
    std::size_t term = 1;
    for (unsigned i = 0; i < d; ++i) term *= s;
    total += term;
  }
  return std::max<std::size_t>(total, 1);
}

namespace {

Polynomial prepared(const ConcreteSystem& sys, const Polynomial& p) {
  sys.validate();
  std::set<Var> state(sys.vars.begin(), sys.vars.end());
  std::map<Var, Polynomial> initials;
  for (const auto& [sym, row] : sys.initial_symbols) initials.emplace(sym, sys.init[row]);
  for (const auto& v : p.variables()) {
    if (state.count(v) != 0 || initials.count(v) != 0) continue;
    if (v.kind != VarKind::Param) throw std::invalid_argument("'" + v.name + "' is not a variable of the loop");
  }
  return initials.empty() ? p : p.substitute(initials);
}

}  // namespace

Verdict check_invariant(const ConcreteSystem& sys, const Polynomial& p) {
  Polynomial q = prepared(sys, p);
  Verdict verdict;
  verdict.bound_used = order_bound(q, std::set<Var>(sys.vars.begin(), sys.vars.end()), sys.size());
  SymMatrix state = sys.init;
  for (std::size_t n = 0; n < verdict.bound_used; ++n) {
    Polynomial value = q.substitute(sys.bindings(state));
    if (!value.is_zero()) {
      verdict.holds = false;
      verdict.witness = Witness{n, value};
      return verdict;
    }
    state = sys.update * state;
  }
  return verdict;
}

Verdict check_invariants(const ConcreteSystem& sys, const std::vector<Polynomial>& ps) {
  // A conjunct that holds vanishes everywhere, so the earliest witness is global.
  Verdict out;
  for (const auto& p : ps) {
    Verdict v = check_invariant(sys, p);
    out.bound_used = std::max(out.bound_used, v.bound_used);
    if (!v.holds && (out.holds || v.witness->n < out.witness->n)) {
      out.holds = false;
      out.witness = v.witness;
    }
  }
  return out;
}

bool check_equiv_modulo(const ConcreteSystem& a, const ConcreteSystem& b, const Polynomial& p,
                        const std::map<Var, Var>& rename) {
  std::set<Var> targets;
  std::map<Var, Polynomial> bindings;
  for (const auto& [from, to] : rename) {
    if (!targets.insert(to).second) throw std::invalid_argument("renaming is not injective at '" + to.name + "'");
    bindings.emplace(from, Polynomial(to));
  }
  for (const auto& v : p.variables()) {
    if (v.kind != VarKind::Param && rename.count(v) == 0) {
      throw std::invalid_argument("renaming misses '" + v.name + "'");
    }
  }
  return check_invariant(a, p).holds && check_invariant(b, p.substitute(bindings)).holds;
}

}  // namespace loopsynth

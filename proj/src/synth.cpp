#include "loopsynth/synth.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>
#include <stdexcept>

namespace loopsynth {

const char* to_string(SynthStatus status) {
  switch (status) {
    case SynthStatus::Found: return "found";
    case SynthStatus::NotFound: return "notfound";
    case SynthStatus::Exhausted: return "exhausted";
  }
  return "?";
}

std::string Cell::to_string() const {
  std::string names;
  for (const auto& v : order) names += (names.empty() ? "" : ",") + v.name;
  return std::string(loopsynth::to_string(tier)) + " [" + partition.to_string() + "] (" + names + ")";
}

namespace {

struct TemplateVars {
  std::vector<Var> all;
  std::optional<std::size_t> carrier;
};

std::string unused_name(const std::string& base, const std::set<std::string>& taken) {
  if (taken.count(base) == 0) return base;
  for (int k = 1;; ++k) {
    std::string name = base + std::to_string(k);
    if (taken.count(name) == 0) return name;
  }
}

TemplateVars compute_template_vars(const SynthRequest& req) {
  if (req.vars.empty()) throw std::invalid_argument("no program variables");
  std::set<std::string> taken;
  for (const auto& v : req.vars) {
    if (!taken.insert(v.name).second) throw std::invalid_argument("variable '" + v.name + "' declared twice");
  }
  for (const auto& p : req.params) taken.insert(p.param.name);
  for (const auto& [sym, var] : req.initial_symbols) taken.insert(sym.name);
  std::size_t fixed = req.vars.size() + (req.aux_one ? 1 : 0);
  std::size_t s = req.size.value_or(fixed);
  if (s < fixed) throw std::invalid_argument("size " + std::to_string(s) + " is smaller than the " +
                                             std::to_string(fixed) + " variables");
  TemplateVars out;
  out.all = req.vars;
  int rank = 0;
  for (const auto& v : req.vars) rank = std::max(rank, v.rank + 1);
  for (const auto& p : req.params) rank = std::max(rank, p.param.rank + 1);
  for (const auto& [sym, var] : req.initial_symbols) rank = std::max(rank, sym.rank + 1);
  for (std::size_t k = 0; k + fixed < s; ++k) {
    std::string name = unused_name("u", taken);
    taken.insert(name);
    out.all.emplace_back(name, VarKind::Program, rank++);
  }
  if (req.aux_one) {
    out.carrier = out.all.size();
    out.all.emplace_back(unused_name("t", taken), VarKind::Program, rank++);
  }
  return out;
}

std::size_t index_in(const std::vector<Var>& order, const Var& v) {
  auto it = std::find(order.begin(), order.end(), v);
  if (it == order.end()) throw std::invalid_argument("'" + v.name + "' is not a program variable");
  return static_cast<std::size_t>(it - order.begin());
}

std::optional<std::size_t> carrier_index(const SynthRequest& req, const Cell& cell) {
  if (!req.aux_one) return std::nullopt;
  return cell.order.size() - 1;
}

}  // namespace

std::vector<Var> template_vars(const SynthRequest& req) { return compute_template_vars(req).all; }

std::vector<Cell> search_cells(const SynthRequest& req) {
  TemplateVars tv = compute_template_vars(req);
  const std::size_t user = req.vars.size();
  std::vector<Var> tail(tv.all.begin() + static_cast<long>(user), tv.all.end());
  std::vector<std::vector<Var>> orders;
  if (req.permutation) {
    std::vector<Var> fixed = *req.permutation;
    std::vector<Var> a = fixed, b = req.vars;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw std::invalid_argument("permutation must list every variable once");
    fixed.insert(fixed.end(), tail.begin(), tail.end());
    orders.push_back(fixed);
  } else {
    std::vector<std::size_t> idx(user);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      std::vector<Var> order;
      for (auto i : idx) order.push_back(req.vars[i]);
      order.insert(order.end(), tail.begin(), tail.end());
      orders.push_back(order);
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  const auto s = static_cast<unsigned>(tv.all.size());
  std::vector<Cell> cells;
  for (auto tier : req.tiers) {
    std::vector<IntegerPartition> parts =
        tier == ShapeTier::UnitUpperTriangular ? std::vector<IntegerPartition>{IntegerPartition{{s}}} : int_partitions(s);
    std::size_t n_orders = tier == ShapeTier::Full ? 1 : orders.size();
    for (std::size_t o = 0; o < n_orders; ++o) {
      for (const auto& part : parts) {
        if (req.partition && !(*req.partition == part)) continue;
        cells.push_back(Cell{tier, orders[o], part});
      }
    }
  }
  return cells;
}

std::vector<Clause> nontriviality_clauses(const RecurrenceTemplate& tpl) {
  SymMatrix d = tpl.b * tpl.a - tpl.a;
  std::vector<Atom> atoms;
  for (const auto& e : d.entries()) atoms.emplace_back(e, Rel::Ne);
  return {Clause(std::move(atoms), ClauseGroup::NonTrivial)};
}

Clause blocking_clause(const RecurrenceTemplate& tpl, const AffineLoop& loop) {
  const std::size_t s = tpl.size;
  std::vector<std::size_t> at(s);
  for (std::size_t i = 0; i < s; ++i) at[i] = index_in(loop.vars, tpl.vars[i]);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) atoms.emplace_back(tpl.b.at(i, j) - loop.update.at(at[i], at[j]), Rel::Ne);
    const Polynomial& init = loop.init[at[i]];
    for (std::size_t l = 0; l < tpl.a.cols(); ++l) {
      Rational value = l < tpl.params.size() ? init.coefficient(Monomial(tpl.params[l])) : init.constant_term();
      atoms.emplace_back(tpl.a.at(i, l) - value, Rel::Ne);
    }
  }
  return Clause(std::move(atoms), ClauseGroup::Block);
}

AffineLoop loop_from_model(const RecurrenceTemplate& tpl, const Model& model, std::optional<std::size_t> constant_index) {
  std::map<Var, Polynomial> bindings;
  auto bind = [&](const std::vector<Var>& unknowns) {
    for (const auto& v : unknowns) {
      auto it = model.values.find(v);
      if (it == model.values.end()) {
        bindings.emplace(v, Polynomial());
      } else if (const auto* q = std::get_if<Rational>(&it->second)) {
        bindings.emplace(v, Polynomial(*q));
      } else {
        throw std::invalid_argument("model value of " + v.name + " is not rational");
      }
    }
  };
  bind(tpl.b_unknowns());
  bind(tpl.a_unknowns());
  AffineLoop loop = make_loop(tpl.vars, tpl.b.substitute(bindings), tpl.a.substitute(bindings) * tpl.xhat);
  loop.constant_index = constant_index;
  loop.initial_symbols = tpl.initial_symbols;
  loop.validate();
  return loop;
}

CellProblem build_cell(const SynthRequest& req, const Cell& cell) {
  SymbolTable session;
  for (const auto& v : cell.order) session.add(v);
  for (const auto& p : req.params) session.add(p.param);
  for (const auto& [sym, var] : req.initial_symbols) session.add(sym);

  TemplateOptions opt;
  opt.tier = cell.tier;
  opt.partition = cell.partition;
  for (const auto& [v, q] : req.pinned_inits) opt.pinned_inits[index_in(cell.order, v)] = q;
  if (!req.params.empty()) {
    ParamSpec ps;
    for (const auto& p : req.params) {
      ps.params.push_back(p.param);
      ps.indices.push_back(p.var ? index_in(cell.order, *p.var) : ParamSpec::kUnbound);
    }
    opt.params = ps;
  }
  CellProblem out;
  out.constant_index = carrier_index(req, cell);
  if (out.constant_index) {
    opt.constant_rows.push_back(*out.constant_index);
    opt.pinned_inits[*out.constant_index] = 1;
  }
  for (const auto& [sym, var] : req.initial_symbols) opt.initial_symbols[sym] = index_in(cell.order, var);

  out.tpl = build_template(session, cell.order, opt);
  out.cfinite = gen_alg(out.tpl, req.invariants).cfinite;
  out.pcp = out.tpl.parameterized() ? build_param_pcp(out.tpl, req.invariants) : build_pcp(out.tpl, req.invariants);
  if (req.avoid_trivial) out.pcp.add_all(nontriviality_clauses(out.tpl));
  return out;
}

SynthResult synthesize(const SynthRequest& req, const CellObserver& observer) {
  if (req.count == 0) throw std::invalid_argument("count must be positive");
  if (req.timeout_seconds <= 0) throw std::invalid_argument("timeout must be positive");
  std::set<Var> known(req.vars.begin(), req.vars.end());
  for (const auto& p : req.params) known.insert(p.param);
  for (const auto& [sym, var] : req.initial_symbols) known.insert(sym);
  for (const auto& p : req.invariants) {
    for (const auto& v : p.variables()) {
      if (known.count(v) == 0) throw std::invalid_argument("invariant mentions undeclared symbol '" + v.name + "'");
    }
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SynthResult result;
  std::vector<Cell> cells = search_cells(req);
  bool incomplete = false;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    CellProblem prob;
    try {
      prob = build_cell(req, cell);
    } catch (const UnsatisfiableInvariant& e) {
      result.status = SynthStatus::NotFound;
      result.detail = e.what();
      return result;
    }
    for (const auto& found : result.loops) prob.pcp.add(blocking_clause(prob.tpl, found.loop));
    ++result.cells_tried;
    while (true) {
      double left = req.timeout_seconds - elapsed();
      if (left < 1) {
        result.status = result.loops.empty() ? SynthStatus::Exhausted : SynthStatus::Found;
        result.detail = "time budget exhausted after " + std::to_string(result.cells_tried) + " cells";
        return result;
      }
      SolverConfig cfg = req.solver;
      cfg.timeout_seconds = std::max(1.0, left / static_cast<double>(cells.size() - c));
      auto cell_start = Clock::now();
      CFiniteTrace trace;
      SolveResult r = solve_cfinite(prob.pcp, prob.cfinite, cfg, &trace);
      if (observer) observer(cell, r);
      if (r.status == SolveStatus::Unknown || r.status == SolveStatus::Timeout) incomplete = true;
      if (r.status != SolveStatus::Sat) break;
      AffineLoop loop;
      try {
        loop = loop_from_model(prob.tpl, r.model, prob.constant_index);
      } catch (const std::invalid_argument&) {
        incomplete = true;
        break;
      }
      if (determinant(loop.update).is_zero()) {
        throw std::logic_error("internal error: singular update matrix in " + cell.to_string());
      }
      Verdict v = check_invariants(loop, req.invariants);
      if (!v.holds) {
        throw std::logic_error("internal error: verifier rejected the model of " + cell.to_string() +
                               " at n = " + std::to_string(v.witness->n));
      }
      SynthLoop found;
      found.loop = loop;
      found.cell = cell;
      found.step = trace.step;
      found.millis = std::chrono::duration<double, std::milli>(Clock::now() - cell_start).count();
      found.bound = v.bound_used;
      result.loops.push_back(found);
      if (result.loops.size() >= req.count) {
        result.status = SynthStatus::Found;
        return result;
      }
      prob.pcp.add(blocking_clause(prob.tpl, loop));
    }
  }
  if (!result.loops.empty()) {
    result.status = SynthStatus::Found;
    result.detail = "search space exhausted before reaching the requested count";
  } else {
    result.status = incomplete ? SynthStatus::Exhausted : SynthStatus::NotFound;
    result.detail = incomplete ? "some cells were undecided" : "no loop in the search space";
  }
  return result;
}

}  // namespace loopsynth

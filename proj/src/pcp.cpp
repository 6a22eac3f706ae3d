#include "loopsynth/pcp.hpp"

#include "json.hpp"

#include <algorithm>

namespace loopsynth {

Polynomial CFiniteConstraint::instance(unsigned j) const {
  Polynomial out;
  for (const auto& [w, u] : terms) out += Polynomial(w.pow(j), Rational(1)) * u;
  return out;
}

std::string CFiniteConstraint::to_string() const {
  std::string out;
  for (const auto& [w, u] : terms) {
    if (!out.empty()) out += " + ";
    out += "(" + u.to_string() + ")";
    if (!w.is_one()) out += "*(" + w.to_string() + ")^n";
  }
  return out + " = 0";
}

void Pcp::add(Clause clause) {
  std::vector<Atom> kept;
  for (auto& atom : clause.disjuncts) {
    if (atom.lhs.is_constant()) {
      if (atom.holds_constant()) return;
      continue;
    }
    kept.push_back(std::move(atom));
  }
  if (kept.empty()) kept.emplace_back(Polynomial(1), Rel::Eq);
  clause.disjuncts = std::move(kept);
  if (!keys_.insert(clause.to_string()).second) return;
  clauses.push_back(std::move(clause));
}

void Pcp::add_all(const std::vector<Clause>& more) {
  for (const auto& c : more) add(c);
}

std::vector<Var> Pcp::unknowns() const {
  std::set<Var> vars;
  for (const auto& c : clauses) {
    auto vs = c.variables();
    vars.insert(vs.begin(), vs.end());
  }
  return {vars.begin(), vars.end()};
}

std::size_t Pcp::count(ClauseGroup group) const {
  return static_cast<std::size_t>(
      std::count_if(clauses.begin(), clauses.end(), [&](const Clause& c) { return c.group == group; }));
}

std::string Pcp::to_json() const {
  nlohmann::ordered_json doc;
  auto& syms = doc["symbols"] = nlohmann::ordered_json::array();
  for (const auto& v : unknowns()) syms.push_back({{"name", v.name}, {"kind", loopsynth::to_string(v.kind)}});
  auto& ps = doc["params"] = nlohmann::ordered_json::array();
  for (const auto& p : params) ps.push_back(p.name);
  auto& cs = doc["clauses"] = nlohmann::ordered_json::array();
  for (const auto& c : clauses) {
    nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
    for (const auto& a : c.disjuncts) atoms.push_back({{"lhs", a.lhs.to_string()}, {"rel", loopsynth::to_string(a.rel)}});
    cs.push_back({{"group", loopsynth::to_string(c.group)}, {"soft", c.soft}, {"disjuncts", atoms}});
  }
  return doc.dump(2);
}

namespace {

Rational binomial(unsigned n, unsigned k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return Rational(out);
}

void push_entries(const SymMatrix& m, ClauseGroup group, std::vector<Clause>& out) {
  for (const auto& e : m.entries()) {
    if (!e.is_zero()) out.push_back(Clause::eq(e, group));
  }
}

}  // namespace

std::vector<Clause> gen_roots(const RecurrenceTemplate& tpl) {
  std::vector<Clause> out;
  const Var& z = tpl.char_var;
  Polynomial target(1);
  for (const auto& [w, m] : tpl.roots.roots) target *= (Polynomial(z) - Polynomial(w)).pow(m);
  Polynomial diff = char_poly(tpl.b, z) - target;
  for (const auto& [k, coeff] : diff.coeffs_in(z)) out.push_back(Clause::eq(coeff, ClauseGroup::Roots));
  const auto& roots = tpl.roots.roots;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      out.push_back(Clause::ne(Polynomial(roots[i].first) - Polynomial(roots[j].first), ClauseGroup::Roots));
    }
  }
  for (const auto& [w, m] : roots) out.push_back(Clause::ne(Polynomial(w), ClauseGroup::Roots));
  return out;
}

std::vector<Clause> gen_coeff(const RecurrenceTemplate& tpl) {
  std::vector<Clause> out;
  for (std::size_t j = 0; j < tpl.coeff_blocks.size(); ++j) {
    const auto& blocks = tpl.coeff_blocks[j];
    Polynomial w(tpl.roots.roots[j].first);
    const auto m = static_cast<unsigned>(blocks.size());
    for (unsigned k = 0; k < m; ++k) {
      SymMatrix d = (tpl.b * blocks[k]).scaled(Polynomial(-1));
      for (unsigned l = k; l < m; ++l) d = d + blocks[l].scaled(w * binomial(l, k));
      push_entries(d * tpl.xhat, ClauseGroup::Coeff, out);
    }
  }
  return out;
}

std::vector<Clause> gen_init(const RecurrenceTemplate& tpl) {
  std::vector<Clause> out;
  SymMatrix unrolled = tpl.initial;
  for (unsigned i = 0; i < tpl.size; ++i) {
    if (i > 0) unrolled = tpl.b * unrolled;
    push_entries(tpl.closed_form_at(i) - unrolled, ClauseGroup::Init, out);
  }
  return out;
}

AlgConstraints gen_alg(const RecurrenceTemplate& tpl, const std::vector<Polynomial>& invariants) {
  std::set<Var> allowed(tpl.vars.begin(), tpl.vars.end());
  allowed.insert(tpl.params.begin(), tpl.params.end());
  std::map<Var, ExpPolynomial> bindings;
  for (std::size_t i = 0; i < tpl.size; ++i) bindings.emplace(tpl.vars[i], tpl.closed_form[i]);
  for (const auto& [v, row] : tpl.initial_symbols) {
    allowed.insert(v);
    bindings.emplace(v, ExpPolynomial(tpl.initial[row]));
  }

  AlgConstraints out;
  for (const auto& p : invariants) {
    for (const auto& v : p.variables()) {
      if (allowed.count(v) == 0) throw std::invalid_argument("invariant mentions unknown variable '" + v.name + "'");
    }
    if (p.is_constant() && !p.is_zero()) {
      throw UnsatisfiableInvariant("invariant " + p.to_string() + " = 0 is a nonzero constant");
    }
    ExpPolynomial e = substitute_exp(p, bindings);
    std::map<unsigned, CFiniteConstraint> by_power;
    for (const auto& [w, u] : e.terms()) {
      for (auto& [k, part] : u.coeffs_in(tpl.counter)) by_power[k].terms.emplace_back(w, std::move(part));
    }
    for (auto& [k, cfc] : by_power) {
      for (unsigned j = 0; j < cfc.length(); ++j) out.clauses.push_back(Clause::eq(cfc.instance(j), ClauseGroup::Alg));
      out.cfinite.push_back(std::move(cfc));
    }
  }
  return out;
}

namespace {

Pcp union_of(const RecurrenceTemplate& tpl, const std::vector<Polynomial>& invariants) {
  AlgConstraints alg = gen_alg(tpl, invariants);
  Pcp pcp;
  pcp.symbols = tpl.symbols;
  pcp.add_all(gen_roots(tpl));
  pcp.add_all(gen_coeff(tpl));
  pcp.add_all(gen_init(tpl));
  pcp.add_all(alg.clauses);
  return pcp;
}

}  // namespace

Pcp build_pcp(const RecurrenceTemplate& tpl, const std::vector<Polynomial>& invariants) {
  if (tpl.parameterized()) throw std::invalid_argument("parameterized template needs build_param_pcp");
  return union_of(tpl, invariants);
}

Pcp build_param_pcp(const RecurrenceTemplate& tpl, const std::vector<Polynomial>& invariants) {
  Pcp raw = union_of(tpl, invariants);
  Pcp pcp;
  pcp.symbols = tpl.symbols;
  pcp.params = tpl.params;
  pcp.add_all(decompose(raw.clauses, tpl.params));
  return pcp;
}

}  // namespace loopsynth

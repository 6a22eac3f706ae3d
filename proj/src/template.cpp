#include "loopsynth/template.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace loopsynth {

unsigned IntegerPartition::sum() const { return std::accumulate(parts.begin(), parts.end(), 0U); }

std::string IntegerPartition::to_string() const {
  std::string out;
  for (unsigned p : parts) {
    if (!out.empty()) out += ",";
    out += std::to_string(p);
  }
  return out;
}

IntegerPartition IntegerPartition::parse(const std::string& text) {
  IntegerPartition out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed partition: " + text);
    }
    if (used != item.size() || v == 0) throw std::invalid_argument("malformed partition: " + text);
    out.parts.push_back(static_cast<unsigned>(v));
  }
  if (out.parts.empty()) throw std::invalid_argument("empty partition");
  std::sort(out.parts.rbegin(), out.parts.rend());
  return out;
}

namespace {

void partitions_rec(unsigned remaining, unsigned max_part, std::vector<unsigned>& prefix,
                    std::vector<IntegerPartition>& out) {
  if (remaining == 0) {
    out.push_back({prefix});
    return;
  }
  for (unsigned p = std::min(remaining, max_part); p >= 1; --p) {
    prefix.push_back(p);
    partitions_rec(remaining - p, p, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<IntegerPartition> int_partitions(unsigned s) {
  if (s < 1) throw std::invalid_argument("partition size must be positive");
  std::vector<IntegerPartition> out;
  std::vector<unsigned> prefix;
  partitions_rec(s, s, prefix, out);
  return out;
}

const char* to_string(ShapeTier tier) {
  switch (tier) {
    case ShapeTier::UnitUpperTriangular: return "un";
    case ShapeTier::UpperTriangular: return "up";
    case ShapeTier::Full: return "fu";
  }
  return "?";
}

ShapeTier parse_tier(const std::string& text) {
  if (text == "un") return ShapeTier::UnitUpperTriangular;
  if (text == "up") return ShapeTier::UpperTriangular;
  if (text == "fu") return ShapeTier::Full;
  throw std::invalid_argument("unknown tier '" + text + "' (expected un, up or fu)");
}

void ExpPolynomial::add(const Monomial& w, const Polynomial& u) {
  if (u.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(w, u);
  if (!inserted) {
    it->second += u;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

ExpPolynomial& ExpPolynomial::operator+=(const ExpPolynomial& other) {
  for (const auto& [w, u] : other.terms_) add(w, u);
  return *this;
}

ExpPolynomial operator*(const ExpPolynomial& a, const ExpPolynomial& b) {
  ExpPolynomial out;
  for (const auto& [wa, ua] : a.terms_) {
    for (const auto& [wb, ub] : b.terms_) out.add(wa * wb, ua * ub);
  }
  return out;
}

ExpPolynomial ExpPolynomial::scaled(const Polynomial& factor) const {
  ExpPolynomial out;
  for (const auto& [w, u] : terms_) out.add(w, u * factor);
  return out;
}

Polynomial ExpPolynomial::at(unsigned k, const Var& counter) const {
  Polynomial out;
  std::map<Var, Polynomial> n_value{{counter, Polynomial(Rational(k))}};
  for (const auto& [w, u] : terms_) out += Polynomial(w.pow(k), Rational(1)) * u.substitute(n_value);
  return out;
}

std::string ExpPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [w, u] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + u.to_string() + ")";
    if (!w.is_one()) out += "*(" + w.to_string() + ")^n";
  }
  return out;
}

ExpPolynomial substitute_exp(const Polynomial& p, const std::map<Var, ExpPolynomial>& bindings) {
  ExpPolynomial out;
  std::map<std::pair<std::string, unsigned>, ExpPolynomial> powers;
  for (const auto& [m, c] : p.terms()) {
    ExpPolynomial term{Polynomial(c)};
    std::vector<Monomial::Factor> kept;
    for (const auto& [v, e] : m.factors()) {
      auto b = bindings.find(v);
      if (b == bindings.end()) {
        kept.emplace_back(v, e);
        continue;
      }
      auto key = std::make_pair(v.name, e);
      auto it = powers.find(key);
      if (it == powers.end()) {
        ExpPolynomial acc{Polynomial(1)};
        for (unsigned i = 0; i < e; ++i) acc = acc * b->second;
        it = powers.emplace(key, std::move(acc)).first;
      }
      term = term * it->second;
    }
    if (!kept.empty()) term = term.scaled(Polynomial(Monomial::from_factors(std::move(kept)), Rational(1)));
    out += term;
  }
  return out;
}

namespace {

std::string idx(std::size_t i) { return std::to_string(i + 1); }

void collect(const SymMatrix& m, std::set<Var>& seen, std::vector<Var>& out, VarKind kind) {
  for (const auto& e : m.entries()) {
    for (const auto& v : e.variables()) {
      if (v.kind == kind && seen.insert(v).second) out.push_back(v);
    }
  }
}

}  // namespace

std::vector<Var> RecurrenceTemplate::b_unknowns() const {
  std::set<Var> seen;
  std::vector<Var> out;
  collect(b, seen, out, VarKind::MatrixEntry);
  return out;
}

std::vector<Var> RecurrenceTemplate::a_unknowns() const {
  std::set<Var> seen;
  std::vector<Var> out;
  collect(a, seen, out, VarKind::InitEntry);
  return out;
}

std::vector<Var> RecurrenceTemplate::root_symbols() const {
  std::vector<Var> out;
  for (const auto& [w, m] : roots.roots) out.push_back(w);
  return out;
}

std::vector<Var> RecurrenceTemplate::coeff_symbols() const {
  std::set<Var> seen;
  std::vector<Var> out;
  for (const auto& per_root : coeff_blocks) {
    for (const auto& block : per_root) collect(block, seen, out, VarKind::Coeff);
  }
  return out;
}

SymMatrix RecurrenceTemplate::closed_form_at(unsigned k) const {
  std::vector<Polynomial> entries;
  for (const auto& cf : closed_form) entries.push_back(cf.at(k, counter));
  return SymMatrix::column(std::move(entries));
}

RecurrenceTemplate build_template(const SymbolTable& session, const std::vector<Var>& vars,
                                  const TemplateOptions& options) {
  const std::size_t s = vars.size();
  if (s == 0) throw std::invalid_argument("template needs at least one variable");
  if (options.partition.sum() != s) {
    throw std::invalid_argument("partition " + options.partition.to_string() + " does not sum to " +
                                std::to_string(s));
  }
  RecurrenceTemplate tpl;
  tpl.size = s;
  tpl.vars = vars;
  tpl.tier = options.tier;
  tpl.partition = options.partition;
  tpl.symbols = session;
  SymbolTable& sym = tpl.symbols;
  for (const auto& v : vars) sym.add(v);

  std::vector<bool> constant_row(s, false);
  for (std::size_t r : options.constant_rows) {
    if (r >= s) throw std::invalid_argument("constant row index out of range");
    constant_row[r] = true;
  }

  tpl.b = SymMatrix(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      Polynomial& e = tpl.b.at(i, j);
      if (constant_row[i]) {
        e = Polynomial(i == j ? 1 : 0);
      } else if (j < i && options.tier != ShapeTier::Full) {
        e = Polynomial(0);
      } else if (j == i && options.tier == ShapeTier::UnitUpperTriangular) {
        e = Polynomial(1);
      } else {
        e = Polynomial(sym.fresh("b_" + idx(i) + "_" + idx(j), VarKind::MatrixEntry));
      }
    }
  }

  std::vector<std::optional<std::size_t>> bound_param(s);
  if (options.params) {
    const ParamSpec& ps = *options.params;
    if (ps.params.size() != ps.indices.size()) throw std::invalid_argument("parameter/index count mismatch");
    for (std::size_t j = 0; j < ps.params.size(); ++j) {
      std::size_t row = ps.indices[j];
      if (row == ParamSpec::kUnbound) {
        sym.add(ps.params[j]);
        continue;
      }
      if (row >= s) throw std::invalid_argument("parameter index out of range");
      if (bound_param[row]) throw std::invalid_argument("two parameters bound to one variable");
      if (options.pinned_inits.count(row) != 0) {
        throw std::invalid_argument("variable " + vars[row].name + " is both pinned and a parameter");
      }
      bound_param[row] = j;
      sym.add(ps.params[j]);
    }
    tpl.params = ps.params;
  }
  for (const auto& [row, value] : options.pinned_inits) {
    if (row >= s) throw std::invalid_argument("pinned initial value index out of range");
  }

  const std::size_t cols = tpl.params.size() + 1;
  const bool param = cols > 1;
  std::vector<Polynomial> xhat;
  for (const auto& p : tpl.params) xhat.emplace_back(p);
  xhat.emplace_back(1);
  tpl.xhat = SymMatrix::column(xhat);

  tpl.a = SymMatrix(s, cols);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      Polynomial& e = tpl.a.at(i, j);
      if (bound_param[i]) {
        e = Polynomial(*bound_param[i] == j ? 1 : 0);
      } else if (auto pin = options.pinned_inits.find(i); pin != options.pinned_inits.end()) {
        e = Polynomial(j + 1 == cols ? pin->second : Rational(0));
      } else {
        std::string name = param ? "a_" + idx(i) + "_" + idx(j) : "a_" + idx(i);
        e = Polynomial(sym.fresh(name, VarKind::InitEntry));
      }
    }
  }
  tpl.initial = tpl.a * tpl.xhat;

  for (const auto& [v, row] : options.initial_symbols) {
    if (row >= s) throw std::invalid_argument("initial symbol index out of range");
    sym.add(v);
  }
  tpl.initial_symbols = options.initial_symbols;

  tpl.counter = sym.fresh("n", VarKind::Counter);
  tpl.char_var = sym.fresh("z", VarKind::Aux);
  const auto& parts = options.partition.parts;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    tpl.roots.roots.emplace_back(sym.fresh("w_" + idx(j), VarKind::Root), parts[j]);
  }

  tpl.closed_form.assign(s, ExpPolynomial());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    Monomial w(tpl.roots.roots[j].first);
    std::vector<SymMatrix> blocks;
    for (unsigned k = 0; k < parts[j]; ++k) {
      SymMatrix c(s, cols);
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t l = 0; l < cols; ++l) {
          std::string name = "c_" + idx(i) + "_" + idx(j) + "_" + idx(k);
          if (param) name += "_" + idx(l);
          c.at(i, l) = Polynomial(sym.fresh(name, VarKind::Coeff));
        }
      }
      SymMatrix cx = c * tpl.xhat;
      Polynomial n_pow = Polynomial(tpl.counter).pow(k);
      for (std::size_t i = 0; i < s; ++i) tpl.closed_form[i] += ExpPolynomial(w, cx[i] * n_pow);
      blocks.push_back(std::move(c));
    }
    tpl.coeff_blocks.push_back(std::move(blocks));
  }
  return tpl;
}

SymMatrix companion_embedding(const std::vector<Rational>& coeffs) {
  if (coeffs.size() < 2) throw std::invalid_argument("recurrence order must be at least 1");
  const std::size_t r = coeffs.size() - 1;
  if (coeffs.back() == 0) throw std::invalid_argument("leading coefficient is zero");
  if (coeffs.front() == 0) throw std::invalid_argument("trailing coefficient is zero");
  SymMatrix m(r, r);
  for (std::size_t i = 0; i + 1 < r; ++i) m.at(i, i + 1) = Polynomial(1);
  for (std::size_t j = 0; j < r; ++j) m.at(r - 1, j) = Polynomial(Rational(-coeffs[j] / coeffs.back()));
  return m;
}

}  // namespace loopsynth

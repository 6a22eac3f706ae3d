#include "loopsynth/loop.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace loopsynth {

namespace {

const char* const kCarrierName = "one$";

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Removes one pair of parentheses enclosing the whole text.
std::string unwrap(const std::string& s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') return s;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth == 0 && i + 1 < s.size()) return s;
  }
  return trim(s.substr(1, s.size() - 2));
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

/// Position of the assignment '=' (not part of '==', '<=' or '>=').
std::size_t assign_pos(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '=') continue;
    bool prev = i > 0 && (s[i - 1] == '=' || s[i - 1] == '<' || s[i - 1] == '>' || s[i - 1] == '!');
    bool next = i + 1 < s.size() && s[i + 1] == '=';
    if (!prev && !next) return i;
  }
  return std::string::npos;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) != 0 || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; });
}

struct Assignment {
  std::vector<std::string> targets;
  std::vector<std::string> values;
};

Assignment read_assignment(const std::string& line, std::size_t lineno) {
  std::size_t eq = assign_pos(line);
  if (eq == std::string::npos) throw ParseError("expected an assignment", lineno, 1);
  Assignment a;
  a.targets = split_top(unwrap(trim(line.substr(0, eq))), ',');
  a.values = split_top(unwrap(trim(line.substr(eq + 1))), ',');
  for (const auto& t : a.targets) {
    if (!is_identifier(t)) throw ParseError("bad assignment target '" + t + "'", lineno, 1);
  }
  if (a.targets.size() != a.values.size()) {
    throw ParseError(std::to_string(a.targets.size()) + " targets but " + std::to_string(a.values.size()) + " values",
                     lineno, eq + 1);
  }
  return a;
}

bool starts_with_word(const std::string& s, std::string_view word) {
  return s.size() >= word.size() && s.compare(0, word.size(), word) == 0 &&
         (s.size() == word.size() || std::isspace(static_cast<unsigned char>(s[word.size()])) != 0);
}

}  // namespace

std::vector<Var> AffineLoop::visible_vars() const {
  std::vector<Var> out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (constant_index != i) out.push_back(vars[i]);
  }
  return out;
}

std::vector<Var> AffineLoop::params() const {
  std::set<Var> seen;
  auto collect = [&](const SymMatrix& m) {
    for (const auto& e : m.entries()) {
      for (const auto& v : e.variables()) {
        if (v.kind == VarKind::Param) seen.insert(v);
      }
    }
  };
  collect(update);
  collect(init);
  return {seen.begin(), seen.end()};
}

void AffineLoop::validate() const {
  std::size_t s = vars.size();
  if (s == 0) throw std::invalid_argument("loop has no variables");
  if (update.rows() != s || update.cols() != s) throw std::invalid_argument("update matrix must be s x s");
  if (init.rows() != s || init.cols() != 1) throw std::invalid_argument("initial vector must be s x 1");
  for (const auto* m : {&update, &init}) {
    for (const auto& e : m->entries()) {
      for (const auto& v : e.variables()) {
        if (v.kind != VarKind::Param) {
          throw std::invalid_argument("loop entry mentions non-parameter symbol '" + v.name + "'");
        }
      }
    }
  }
  if (constant_index) {
    std::size_t k = *constant_index;
    if (k >= s) throw std::invalid_argument("constant index out of range");
    if (init[k] != Polynomial(1)) throw std::invalid_argument("constant variable must start at 1");
    for (std::size_t j = 0; j < s; ++j) {
      if (update.at(k, j) != Polynomial(j == k ? 1 : 0)) throw std::invalid_argument("constant variable must stay 1");
    }
  }
  for (const auto& [sym, row] : initial_symbols) {
    if (row >= s) throw std::invalid_argument("initial symbol '" + sym.name + "' refers to a missing row");
  }
}

std::vector<SymMatrix> AffineLoop::trace(std::size_t steps) const {
  std::vector<SymMatrix> out;
  if (steps == 0) return out;
  out.push_back(init);
  while (out.size() < steps) out.push_back(update * out.back());
  return out;
}

std::map<Var, Polynomial> AffineLoop::bindings(const SymMatrix& state) const {
  std::map<Var, Polynomial> out;
  for (std::size_t i = 0; i < vars.size(); ++i) out.emplace(vars[i], state[i]);
  return out;
}

AffineLoop make_loop(std::vector<Var> vars, SymMatrix update, SymMatrix init) {
  AffineLoop loop;
  loop.vars = std::move(vars);
  loop.update = std::move(update);
  loop.init = std::move(init);
  loop.validate();
  return loop;
}

LoopFile parse_loop(std::string_view text) {
  LoopFile file;
  std::vector<std::pair<std::size_t, std::string>> lines;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t no = 0;
    while (std::getline(in, raw)) {
      ++no;
      std::string line = trim(raw);
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (file.name.empty()) file.name = trim(line.substr(1));
        continue;
      }
      if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
      lines.emplace_back(no, line);
    }
  }
  std::vector<Var> vars;
  std::map<std::string, Var> params;
  int next_rank = 0;
  std::size_t pos = 0;
  if (pos >= lines.size()) throw ParseError("empty loop file", 1, 1);

  // Identifiers other than loop variables are parameters.
  auto lookup = [&](const std::string& name) -> Var {
    for (const auto& v : vars) {
      if (v.name == name) return v;
    }
    auto it = params.find(name);
    if (it != params.end()) return it->second;
    Var p(name, VarKind::Param, 1000 + static_cast<int>(params.size()));
    params.emplace(name, p);
    return p;
  };

  auto [init_line, init_text] = lines[pos++];
  Assignment header = read_assignment(init_text, init_line);
  for (const auto& t : header.targets) {
    if (std::any_of(vars.begin(), vars.end(), [&](const Var& v) { return v.name == t; })) {
      throw ParseError("variable '" + t + "' initialized twice", init_line, 1);
    }
    vars.emplace_back(t, VarKind::Program, next_rank++);
  }
  std::vector<Polynomial> init_values;
  for (const auto& e : header.values) {
    Polynomial p = parse_polynomial(e, lookup, init_line);
    for (const auto& v : p.variables()) {
      if (v.kind == VarKind::Program) throw ParseError("initial value refers to loop variable '" + v.name + "'", init_line, 1);
    }
    init_values.push_back(std::move(p));
  }

  if (pos >= lines.size() || !starts_with_word(lines[pos].second, "while")) {
    throw ParseError("expected 'while'", pos < lines.size() ? lines[pos].first : init_line + 1, 1);
  }
  ++pos;
  std::map<Var, Polynomial> current;
  for (const auto& v : vars) current.emplace(v, Polynomial(v));
  bool closed = false;
  for (; pos < lines.size(); ++pos) {
    auto [no, line] = lines[pos];
    if (line == "end") {
      closed = true;
      ++pos;
      break;
    }
    Assignment a = read_assignment(line, no);
    std::vector<Polynomial> next;
    for (const auto& e : a.values) next.push_back(parse_polynomial(e, lookup, no).substitute(current));
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
      auto it = std::find_if(vars.begin(), vars.end(), [&](const Var& v) { return v.name == a.targets[i]; });
      if (it == vars.end()) throw ParseError("assignment to undeclared variable '" + a.targets[i] + "'", no, 1);
      for (const auto& [m, c] : next[i].terms()) {
        unsigned d = 0;
        for (const auto& [v, e] : m.factors()) {
          if (v.kind == VarKind::Program) d += e;
        }
        if (d > 1) throw ParseError("update of '" + a.targets[i] + "' is not affine", no, 1);
      }
      current[*it] = next[i];
    }
  }
  if (!closed) throw ParseError("missing 'end'", lines.back().first, 1);
  for (; pos < lines.size(); ++pos) {
    auto [no, line] = lines[pos];
    if (!starts_with_word(line, "invariant")) throw ParseError("unexpected text after 'end'", no, 1);
    file.invariants.push_back(trim(line.substr(9)));
  }

  // Split each update into its linear part and constant part.
  std::size_t s = vars.size();
  std::vector<std::vector<Polynomial>> rows(s, std::vector<Polynomial>(s));
  std::vector<Polynomial> constants(s);
  for (std::size_t i = 0; i < s; ++i) {
    for (const auto& [m, c] : current.at(vars[i]).terms()) {
      std::optional<std::size_t> which;
      std::vector<Monomial::Factor> rest;
      for (const auto& [v, e] : m.factors()) {
        if (v.kind == VarKind::Program) {
          which = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin());
        } else {
          rest.emplace_back(v, e);
        }
      }
      Polynomial coeff(Monomial::from_factors(rest), c);
      if (which) {
        rows[i][*which] += coeff;
      } else {
        constants[i] += coeff;
      }
    }
  }
  bool affine = std::any_of(constants.begin(), constants.end(), [](const Polynomial& p) { return !p.is_zero(); });
  std::size_t n = affine ? s + 1 : s;
  SymMatrix u(n, n);
  SymMatrix a(n, 1);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) u.at(i, j) = rows[i][j];
    if (affine) u.at(i, s) = constants[i];
    a.at(i, 0) = init_values[i];
  }
  AffineLoop& loop = file.loop;
  loop.vars = vars;
  if (affine) {
    loop.vars.emplace_back(kCarrierName, VarKind::Program, next_rank);
    u.at(s, s) = Polynomial(1);
    a.at(s, 0) = Polynomial(1);
    loop.constant_index = s;
  }
  loop.update = std::move(u);
  loop.init = std::move(a);
  loop.validate();
  return file;
}

Resolver loop_resolver(const AffineLoop& loop) {
  std::map<std::string, Var> known;
  for (const auto& v : loop.visible_vars()) known.emplace(v.name, v);
  for (const auto& p : loop.params()) known.emplace(p.name, p);
  for (const auto& [sym, row] : loop.initial_symbols) known.emplace(sym.name, sym);
  return [known](const std::string& name) -> Var {
    auto it = known.find(name);
    if (it == known.end()) throw std::invalid_argument("unknown identifier '" + name + "'");
    return it->second;
  };
}

std::optional<std::vector<std::size_t>> sequential_order(const AffineLoop& loop) {
  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    if (loop.constant_index != i) visible.push_back(i);
  }
  // Row i reading variable j != i must be written before j.
  std::map<std::size_t, std::set<std::size_t>> must_precede;
  std::map<std::size_t, std::size_t> indegree;
  for (auto i : visible) indegree[i] = 0;
  for (auto i : visible) {
    for (auto j : visible) {
      if (i != j && !loop.update.at(i, j).is_zero() && must_precede[i].insert(j).second) ++indegree[j];
    }
  }
  std::vector<std::size_t> order;
  std::set<std::size_t> ready;
  for (auto [i, d] : indegree) {
    if (d == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (auto j : must_precede[i]) {
      if (--indegree[j] == 0) ready.insert(j);
    }
  }
  if (order.size() != visible.size()) return std::nullopt;
  return order;
}

namespace {

Polynomial row_expression(const AffineLoop& loop, std::size_t i) {
  Polynomial out;
  for (std::size_t j = 0; j < loop.size(); ++j) {
    const Polynomial& c = loop.update.at(i, j);
    if (c.is_zero()) continue;
    out += loop.constant_index == j ? c : c * Polynomial(loop.vars[j]);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

}  // namespace

std::string render_loop(const AffineLoop& loop, LoopStyle style, const std::string& name) {
  std::ostringstream out;
  if (!name.empty()) out << "# " << name << "\n";
  std::vector<std::string> names;
  std::vector<std::string> inits;
  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    if (loop.constant_index == i) continue;
    visible.push_back(i);
    names.push_back(loop.vars[i].name);
    inits.push_back(loop.init[i].to_string());
  }
  out << join(names) << " = " << join(inits) << "\nwhile true\n";
  std::optional<std::vector<std::size_t>> order;
  if (style != LoopStyle::Tuple) order = sequential_order(loop);
  if (style == LoopStyle::Sequential && !order) throw std::invalid_argument("loop has no sequential form");
  if (order) {
    std::vector<std::size_t> moving;
    for (auto i : *order) {
      if (row_expression(loop, i) != Polynomial(loop.vars[i])) moving.push_back(i);
    }
    if (moving.empty() && !order->empty()) moving.push_back(order->front());
    for (auto i : moving) out << "  " << loop.vars[i].name << " = " << row_expression(loop, i).to_string() << "\n";
  } else {
    std::vector<std::string> values;
    for (auto i : visible) values.push_back(row_expression(loop, i).to_string());
    out << "  " << join(names) << " = " << join(values) << "\n";
  }
  out << "end\n";
  return out.str();
}

}  // namespace loopsynth

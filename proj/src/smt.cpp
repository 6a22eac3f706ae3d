#include "loopsynth/smt.hpp"

#include "loopsynth/process.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <set>
#include <sstream>

namespace loopsynth {

SolverConfig SolverConfig::from_environment() {
  SolverConfig cfg;
  if (const char* exe = std::getenv("LOOPSYNTH_SOLVER"); exe != nullptr && *exe != '\0') cfg = for_executable(exe);
  if (const char* flags = std::getenv("LOOPSYNTH_SOLVER_FLAGS"); flags != nullptr) {
    cfg.flags.clear();
    std::istringstream in(flags);
    for (std::string f; in >> f;) cfg.flags.push_back(f);
  }
  return cfg;
}

SolverConfig SolverConfig::for_executable(const std::string& path) {
  SolverConfig cfg;
  cfg.executable = path;
  std::string base = path.substr(path.find_last_of('/') + 1);
  if (base.find("z3") == std::string::npos) {
    cfg.flags.clear();
    cfg.supports_soft = false;
  }
  return cfg;
}

std::string AlgebraicTag::to_string() const {
  std::string out = "root(" + defining.to_string() + ", " + std::to_string(index) + ")";
  if (has_interval) out += " in [" + loopsynth::to_string(lo) + ", " + loopsynth::to_string(hi) + "]";
  return out;
}

bool Model::all_rational() const {
  return std::all_of(values.begin(), values.end(),
                     [](const auto& kv) { return std::holds_alternative<Rational>(kv.second); });
}

std::optional<Rational> Model::rational(const Var& v) const {
  auto it = values.find(v);
  if (it == values.end() || !std::holds_alternative<Rational>(it->second)) return std::nullopt;
  return std::get<Rational>(it->second);
}

std::map<Var, Rational> Model::rational_values() const {
  std::map<Var, Rational> out;
  for (const auto& [v, val] : values) {
    if (const auto* q = std::get_if<Rational>(&val)) out.emplace(v, *q);
  }
  return out;
}

std::string Model::to_string() const {
  std::string out;
  for (const auto& [v, val] : values) {
    out += v.name + " = ";
    if (const auto* q = std::get_if<Rational>(&val)) {
      out += loopsynth::to_string(*q);
    } else {
      out += std::get<AlgebraicTag>(val).to_string();
    }
    out += "\n";
  }
  return out;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Sat: return "sat";
    case SolveStatus::Unsat: return "unsat";
    case SolveStatus::Unknown: return "unknown";
    case SolveStatus::Timeout: return "timeout";
  }
  return "?";
}

std::string clause_label(std::size_t i) { return "c" + std::to_string(i); }

namespace {

// ---------------------------------------------------------------- s-expressions

struct SExpr {
  bool atom = true;
  std::string text;
  std::vector<SExpr> items;

  bool is(const char* s) const { return atom && text == s; }
};

class SExprReader {
 public:
  explicit SExprReader(const std::string& text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    while (skip()) out.push_back(read());
    return out;
  }

 private:
  bool skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        return true;
      }
    }
    return false;
  }

  SExpr read() {
    if (!skip()) throw SolverError(SolverError::Kind::Protocol, "unexpected end of solver output");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SExpr list;
      list.atom = false;
      while (true) {
        if (!skip()) throw SolverError(SolverError::Kind::Protocol, "unbalanced parenthesis in solver output");
        if (text_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')') throw SolverError(SolverError::Kind::Protocol, "unexpected ')' in solver output");
    SExpr a;
    if (c == '|') {
      std::size_t end = text_.find('|', pos_ + 1);
      if (end == std::string::npos) throw SolverError(SolverError::Kind::Protocol, "unterminated |symbol|");
      a.text = text_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return a;
    }
    if (c == '"') {
      std::size_t end = pos_ + 1;
      while (end < text_.size()) {
        if (text_[end] == '"') {
          if (end + 1 < text_.size() && text_[end + 1] == '"') {
            end += 2;
            continue;
          }
          break;
        }
        ++end;
      }
      a.text = text_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return a;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) == 0 && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    a.text = text_.substr(start, pos_ - start);
    return a;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void protocol(const std::string& message) { throw SolverError(SolverError::Kind::Protocol, message); }

using SymbolResolver = std::function<Polynomial(const std::string&)>;

Rational numeral(const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::exception&) {
    protocol("malformed numeral '" + text + "'");
  }
}

bool is_numeral(const std::string& t) {
  return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) != 0 || t[0] == '.');
}

Polynomial to_polynomial(const SExpr& e, const SymbolResolver& resolve) {
  if (e.atom) {
    if (is_numeral(e.text)) return Polynomial(numeral(e.text));
    return resolve(e.text);
  }
  if (e.items.empty() || !e.items[0].atom) protocol("malformed term");
  const std::string& op = e.items[0].text;
  std::vector<Polynomial> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(to_polynomial(e.items[i], resolve));
  if (args.empty()) protocol("operator without arguments: " + op);
  if (op == "+") {
    Polynomial out;
    for (const auto& a : args) out += a;
    return out;
  }
  if (op == "-") {
    if (args.size() == 1) return -args[0];
    Polynomial out = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) out -= args[i];
    return out;
  }
  if (op == "*") {
    Polynomial out(1);
    for (const auto& a : args) out *= a;
    return out;
  }
  if (op == "/") {
    Polynomial out = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (!args[i].is_constant() || args[i].is_zero()) protocol("division by a non-constant");
      out *= Rational(1) / args[i].constant_term();
    }
    return out;
  }
  if (op == "^") {
    if (args.size() != 2 || !args[1].is_constant() || !is_integer(args[1].constant_term()) ||
        args[1].constant_term() < 0) {
      protocol("unsupported exponent");
    }
    return args[0].pow(static_cast<unsigned>(args[1].constant_term().get_num().get_ui()));
  }
  if (op == "to_real") return args[0];
  protocol("unsupported operator '" + op + "'");
}

// ---------------------------------------------------------------- emission

bool simple_symbol(const std::string& name) {
  static const std::set<std::string> reserved{"and", "or", "not", "let", "true", "false", "ite", "exists",
                                              "forall", "as", "par", "_", "!", "assert", "distinct"};
  if (name.empty() || reserved.count(name) != 0) return false;
  if (std::isdigit(static_cast<unsigned char>(name[0])) != 0) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; });
}

std::string symbol(const std::string& name) { return simple_symbol(name) ? name : "|" + name + "|"; }

std::string rational_term(const Rational& q) {
  std::string mag;
  Rational a = abs(q);
  if (is_integer(a)) {
    mag = a.get_num().get_str();
  } else {
    mag = "(/ " + a.get_num().get_str() + " " + a.get_den().get_str() + ")";
  }
  return q < 0 ? "(- " + mag + ")" : mag;
}

std::string monomial_term(const Monomial& m) {
  std::vector<std::string> factors;
  for (const auto& [v, e] : m.factors()) {
    for (unsigned i = 0; i < e; ++i) factors.push_back(symbol(v.name));
  }
  if (factors.size() == 1) return factors[0];
  std::string out = "(*";
  for (const auto& f : factors) out += " " + f;
  return out + ")";
}

std::string atom_term(const Atom& a) {
  std::string lhs = smt_term(a.lhs);
  switch (a.rel) {
    case Rel::Eq: return "(= " + lhs + " 0)";
    case Rel::Ne: return "(not (= " + lhs + " 0))";
    case Rel::Lt: return "(< " + lhs + " 0)";
    case Rel::Le: return "(<= " + lhs + " 0)";
    case Rel::Gt: return "(> " + lhs + " 0)";
    case Rel::Ge: return "(>= " + lhs + " 0)";
  }
  return "";
}

std::string clause_term(const Clause& c) {
  if (c.is_unit()) return atom_term(c.disjuncts.front());
  std::string out = "(or";
  for (const auto& a : c.disjuncts) out += " " + atom_term(a);
  return out + ")";
}

std::vector<Var> declared_symbols(const Pcp& pcp) {
  std::set<Var> vars;
  for (const auto& c : pcp.clauses) {
    auto vs = c.variables();
    vars.insert(vs.begin(), vs.end());
  }
  return {vars.begin(), vars.end()};
}

}  // namespace

std::string smt_term(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (const auto& [m, c] : p.terms()) {
    if (m.is_one()) {
      terms.push_back(rational_term(c));
    } else if (c == 1) {
      terms.push_back(monomial_term(m));
    } else {
      std::string mt = monomial_term(m);
      if (mt.front() == '(') mt = mt.substr(3, mt.size() - 4);
      terms.push_back("(* " + rational_term(c) + " " + mt + ")");
    }
  }
  if (terms.size() == 1) return terms[0];
  std::string out = "(+";
  for (const auto& t : terms) out += " " + t;
  return out + ")";
}

std::string emit_smtlib(const Pcp& pcp, const EmitOptions& options) {
  std::ostringstream out;
  if (options.get_values) out << "(set-option :produce-models true)\n";
  if (options.named || options.get_core) out << "(set-option :produce-unsat-cores true)\n";
  if (options.timeout_ms > 0) out << "(set-option :timeout " << options.timeout_ms << ")\n";
  out << "(set-logic QF_NRA)\n";
  auto vars = declared_symbols(pcp);
  for (const auto& v : vars) out << "(declare-fun " << symbol(v.name) << " () Real)\n";
  for (std::size_t i = 0; i < pcp.clauses.size(); ++i) {
    const Clause& c = pcp.clauses[i];
    if (c.soft) {
      if (options.soft) out << "(assert-soft " << clause_term(c) << " :id goal)\n";
      continue;
    }
    if (options.named) {
      out << "(assert (! " << clause_term(c) << " :named " << clause_label(i) << "))\n";
    } else {
      out << "(assert " << clause_term(c) << ")\n";
    }
  }
  out << "(check-sat)\n";
  if (options.get_values && !vars.empty()) {
    std::string list;
    for (const auto& v : vars) list += (list.empty() ? "" : " ") + symbol(v.name);
    out << "(get-value (" << list << "))\n";
    out << "(set-option :pp.decimal true)\n";
    out << "(get-value (" << list << "))\n";
  }
  if (options.get_core) out << "(get-unsat-core)\n";
  if (options.get_values || options.get_core) out << "(exit)\n";
  return out.str();
}

namespace {

Atom atom_from(const SExpr& e, const SymbolResolver& resolve) {
  if (e.atom || e.items.size() < 2) protocol("malformed atom");
  const std::string& op = e.items[0].text;
  if (op == "not") {
    Atom inner = atom_from(e.items[1], resolve);
    if (inner.rel != Rel::Eq) protocol("only negated equalities are supported");
    return Atom(inner.lhs, Rel::Ne);
  }
  if (e.items.size() != 3) protocol("malformed atom");
  Polynomial p = to_polynomial(e.items[1], resolve) - to_polynomial(e.items[2], resolve);
  if (op == "=") return Atom(p, Rel::Eq);
  if (op == "<") return Atom(p, Rel::Lt);
  if (op == "<=") return Atom(p, Rel::Le);
  if (op == ">") return Atom(p, Rel::Gt);
  if (op == ">=") return Atom(p, Rel::Ge);
  protocol("unsupported relation '" + op + "'");
}

Clause clause_from(const SExpr& e, const SymbolResolver& resolve) {
  if (!e.atom && !e.items.empty() && e.items[0].is("!")) return clause_from(e.items[1], resolve);
  if (!e.atom && !e.items.empty() && e.items[0].is("or")) {
    std::vector<Atom> atoms;
    for (std::size_t i = 1; i < e.items.size(); ++i) atoms.push_back(atom_from(e.items[i], resolve));
    return Clause(std::move(atoms));
  }
  return Clause({atom_from(e, resolve)});
}

SymbolResolver table_resolver(const SymbolTable& symbols) {
  return [&symbols](const std::string& name) {
    auto v = symbols.lookup(name);
    if (!v) protocol("unknown symbol '" + name + "'");
    return Polynomial(*v);
  };
}

}  // namespace

std::vector<Clause> parse_smtlib_asserts(const std::string& script, const SymbolTable& symbols) {
  auto resolve = table_resolver(symbols);
  std::vector<Clause> out;
  for (const auto& cmd : SExprReader(script).all()) {
    if (cmd.atom || cmd.items.empty()) continue;
    if (cmd.items[0].is("assert")) {
      out.push_back(clause_from(cmd.items.at(1), resolve));
    } else if (cmd.items[0].is("assert-soft")) {
      Clause c = clause_from(cmd.items.at(1), resolve);
      c.soft = true;
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

// ---------------------------------------------------------------- solving

Rational eval_numeric(const SExpr& e) {
  Polynomial p = to_polynomial(e, [](const std::string& name) -> Polynomial {
    protocol("unexpected symbol '" + name + "' in model value");
  });
  if (!p.is_constant()) protocol("non-constant model value");
  return p.constant_term();
}

bool is_root_obj(const SExpr& e) { return !e.atom && !e.items.empty() && e.items[0].is("root-obj"); }

AlgebraicTag root_tag(const SExpr& e) {
  if (e.items.size() != 3) protocol("malformed root-obj");
  Var x("x", VarKind::Aux);
  AlgebraicTag tag;
  tag.defining = to_polynomial(e.items[1], [&](const std::string&) { return Polynomial(x); });
  tag.index = static_cast<unsigned>(std::stoul(e.items[2].text));
  return tag;
}

/// Decimal approximation "d?" (or "(- d?)") -> enclosing interval.
bool decimal_interval(const SExpr& e, Rational& lo, Rational& hi) {
  bool neg = false;
  const SExpr* atom = &e;
  if (!e.atom && e.items.size() == 2 && e.items[0].is("-")) {
    neg = true;
    atom = &e.items[1];
  }
  if (!atom->atom) return false;
  std::string t = atom->text;
  bool approx = !t.empty() && t.back() == '?';
  if (approx) t.pop_back();
  Rational d;
  try {
    d = parse_rational(t);
  } catch (const std::exception&) {
    return false;
  }
  std::size_t dot = t.find('.');
  std::size_t digits = dot == std::string::npos ? 0 : t.size() - dot - 1;
  Rational eps = approx ? Rational(1, 1) / pow(Rational(10), static_cast<unsigned>(digits)) : Rational(0);
  if (neg) d = -d;
  lo = d - eps;
  hi = d + eps;
  return true;
}

struct RawResponse {
  SolveStatus status = SolveStatus::Unknown;
  std::vector<SExpr> value_lists;
  std::vector<std::string> core;
};

RawResponse parse_response(const std::string& out) {
  RawResponse r;
  auto items = SExprReader(out).all();
  bool have_status = false;
  for (const auto& e : items) {
    if (e.atom) {
      if (!have_status && (e.text == "sat" || e.text == "unsat" || e.text == "unknown" || e.text == "timeout")) {
        have_status = true;
        if (e.text == "sat") r.status = SolveStatus::Sat;
        if (e.text == "unsat") r.status = SolveStatus::Unsat;
        if (e.text == "timeout") r.status = SolveStatus::Timeout;
      }
      continue;
    }
    if (!e.items.empty() && e.items[0].is("error")) continue;
    bool pairs = !e.items.empty() && std::all_of(e.items.begin(), e.items.end(), [](const SExpr& x) {
      return !x.atom && x.items.size() == 2 && x.items[0].atom;
    });
    bool symbols = std::all_of(e.items.begin(), e.items.end(), [](const SExpr& x) { return x.atom; });
    if (pairs) {
      r.value_lists.push_back(e);
    } else if (symbols && r.status == SolveStatus::Unsat) {
      for (const auto& x : e.items) r.core.push_back(x.text);
    }
  }
  if (!have_status) protocol("solver produced no check-sat answer");
  return r;
}

Model read_model(const RawResponse& r, const std::vector<Var>& vars) {
  std::map<std::string, Var> by_name;
  for (const auto& v : vars) by_name.emplace(v.name, v);
  Model m;
  if (r.value_lists.empty()) {
    if (!vars.empty()) protocol("solver returned no model values");
    return m;
  }
  for (const auto& pair : r.value_lists[0].items) {
    auto it = by_name.find(pair.items[0].text);
    if (it == by_name.end()) protocol("model value for unknown symbol '" + pair.items[0].text + "'");
    if (is_root_obj(pair.items[1])) {
      m.values[it->second] = root_tag(pair.items[1]);
    } else {
      m.values[it->second] = eval_numeric(pair.items[1]);
    }
  }
  if (r.value_lists.size() > 1) {
    for (const auto& pair : r.value_lists[1].items) {
      auto it = by_name.find(pair.items[0].text);
      if (it == by_name.end()) continue;
      auto mv = m.values.find(it->second);
      if (mv == m.values.end()) continue;
      if (auto* tag = std::get_if<AlgebraicTag>(&mv->second)) {
        tag->has_interval = decimal_interval(pair.items[1], tag->lo, tag->hi);
      }
    }
  }
  for (const auto& v : vars) {
    if (m.values.count(v) == 0) protocol("solver omitted a value for '" + v.name + "'");
  }
  return m;
}

bool covered(const std::set<Var>& vars, const std::map<Var, Rational>& values) {
  return std::all_of(vars.begin(), vars.end(), [&](const Var& v) { return values.count(v) != 0; });
}

/// Exact re-check of the hard clauses. Returns false when some clause could
/// not be evaluated because of algebraic values.
bool recheck(const Pcp& pcp, const Model& model) {
  auto values = model.rational_values();
  bool complete = true;
  for (std::size_t i = 0; i < pcp.clauses.size(); ++i) {
    const Clause& c = pcp.clauses[i];
    if (c.soft) continue;
    if (!covered(c.variables(), values)) {
      complete = false;
      continue;
    }
    if (!c.holds(values)) {
      throw SolverError(SolverError::Kind::ModelCheck,
                        "solver model violates clause " + clause_label(i) + ": " + c.to_string());
    }
  }
  return complete;
}

}  // namespace

namespace {

struct Query {
  RawResponse raw;
  bool timed_out = false;
  double elapsed = 0;
};

Query run_query(const Pcp& pcp, const SolverConfig& cfg, const EmitOptions& opt, double seconds) {
  EmitOptions o = opt;
  o.timeout_ms = static_cast<long>(seconds * 1000);
  std::string script = emit_smtlib(pcp, o);
  auto start = std::chrono::steady_clock::now();
  ProcessResult proc = run_process(cfg.executable, cfg.flags, script, seconds + 2);
  Query q;
  q.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!proc.launched) throw SolverError(SolverError::Kind::Process, "cannot run solver: " + proc.err);
  if (proc.timed_out) {
    q.timed_out = true;
    return q;
  }
  try {
    q.raw = parse_response(proc.out);
  } catch (const SolverError& e) {
    throw SolverError(SolverError::Kind::Process, std::string(e.what()) + "; exit code " +
                                                      std::to_string(proc.exit_code) + "; stderr: " + proc.err +
                                                      "; stdout: " + proc.out.substr(0, 400));
  }
  if (q.raw.status == SolveStatus::Unknown && q.elapsed >= seconds * 0.95) q.timed_out = true;
  return q;
}

}  // namespace

SolveResult solve(const Pcp& pcp, const SolverConfig& cfg) {
  if (cfg.timeout_seconds <= 0) throw std::invalid_argument("solver timeout must be positive");
  // z3's nonlinear engine is much slower with tracked assertions, so cores come from a second query.
  EmitOptions opt;
  opt.soft = cfg.supports_soft;
  opt.get_values = true;
  SolveResult result;
  Query q = run_query(pcp, cfg, opt, cfg.timeout_seconds);
  if (q.timed_out) {
    result.status = SolveStatus::Timeout;
    result.detail = "solver gave up after " + std::to_string(cfg.timeout_seconds) + " s";
    return result;
  }
  result.status = q.raw.status;
  if (q.raw.status == SolveStatus::Sat) {
    result.model = read_model(q.raw, declared_symbols(pcp));
    result.inexact = !recheck(pcp, result.model);
  } else if (q.raw.status == SolveStatus::Unsat && cfg.supports_cores) {
    double left = std::min(cfg.timeout_seconds - q.elapsed, std::max(0.5, 4 * q.elapsed));
    if (left < 0.5) return result;
    EmitOptions core_opt;
    core_opt.named = true;
    core_opt.get_core = true;
    Query c = run_query(pcp, cfg, core_opt, left);
    if (!c.timed_out && c.raw.status == SolveStatus::Unsat) {
      result.core = c.raw.core;
      result.has_core = true;
    }
  }
  return result;
}

bool vandermonde_zero_check(const std::vector<Rational>& ws, const std::vector<Rational>& us) {
  if (ws.size() != us.size()) throw std::invalid_argument("ws and us differ in length");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    for (std::size_t j = i + 1; j < ws.size(); ++j) {
      if (ws[i] == ws[j]) throw std::invalid_argument("duplicate base " + to_string(ws[i]));
    }
  }
  std::vector<Rational> power(ws.size(), Rational(1));
  for (std::size_t n = 0; n < ws.size(); ++n) {
    Rational sum = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      sum += power[i] * us[i];
      power[i] *= ws[i];
    }
    if (sum != 0) return false;
  }
  return true;
}

namespace {

bool rgs_rec(std::vector<std::size_t>& rgs, std::size_t pos, std::size_t used, std::size_t blocks,
             const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  const std::size_t l = rgs.size();
  if (pos == l) return used == blocks ? fn(rgs) : true;
  // not enough positions left to open the remaining blocks
  if (blocks - used > l - pos) return true;
  std::size_t limit = std::min(used + 1, blocks);
  for (std::size_t b = 0; b < limit; ++b) {
    rgs[pos] = b;
    if (!rgs_rec(rgs, pos + 1, std::max(used, b + 1), blocks, fn)) return false;
  }
  return true;
}

}  // namespace

void for_each_set_partition(std::size_t l, const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  if (l == 0) return;
  std::vector<std::size_t> rgs(l, 0);
  for (std::size_t blocks = l; blocks >= 1; --blocks) {
    if (!rgs_rec(rgs, 0, 0, blocks, fn)) return;
  }
}

namespace {

struct CFiniteSetup {
  Pcp hard;
  std::vector<Monomial> bases;
  /// per constraint: (base index, u)
  std::vector<std::vector<std::pair<std::size_t, Polynomial>>> terms;
};

std::size_t base_index(std::vector<Monomial>& bases, const Monomial& w) {
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (bases[i] == w) return i;
  }
  bases.push_back(w);
  return bases.size() - 1;
}

std::string partition_text(const std::vector<std::size_t>& rgs) {
  std::size_t blocks = rgs.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
  std::string out;
  for (std::size_t b = 0; b < blocks; ++b) {
    out += "{";
    bool first = true;
    for (std::size_t i = 0; i < rgs.size(); ++i) {
      if (rgs[i] != b) continue;
      out += (first ? "" : ",") + std::to_string(i + 1);
      first = false;
    }
    out += "}";
  }
  return out;
}

std::vector<Clause> partition_clauses(const CFiniteSetup& setup, const std::vector<std::size_t>& rgs,
                                      const std::vector<Var>& params) {
  std::size_t blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
  std::vector<std::vector<std::size_t>> members(blocks);
  for (std::size_t i = 0; i < rgs.size(); ++i) members[rgs[i]].push_back(i);
  auto base = [&](std::size_t i) { return Polynomial(setup.bases[i], Rational(1)); };
  std::vector<Clause> out;
  for (const auto& m : members) {
    for (std::size_t k = 1; k < m.size(); ++k) out.push_back(Clause::eq(base(m[k - 1]) - base(m[k]), ClauseGroup::Partition));
  }
  for (std::size_t a = 0; a < blocks; ++a) {
    for (std::size_t b = a + 1; b < blocks; ++b) {
      out.push_back(Clause::ne(base(members[a][0]) - base(members[b][0]), ClauseGroup::Partition));
    }
  }
  for (const auto& cfc : setup.terms) {
    std::vector<Polynomial> sums(blocks);
    std::vector<bool> present(blocks, false);
    for (const auto& [bi, u] : cfc) {
      sums[rgs[bi]] += u;
      present[rgs[bi]] = true;
    }
    for (std::size_t b = 0; b < blocks; ++b) {
      if (!present[b]) continue;
      for (auto& q : decompose_polynomial(sums[b], params)) out.push_back(Clause::eq(q, ClauseGroup::Block));
    }
  }
  return out;
}

/// Substitutes the rational part of the model; algebraic symbols remain.
std::map<Var, Polynomial> as_bindings(const Model& model) {
  std::map<Var, Polynomial> out;
  for (const auto& [v, q] : model.rational_values()) out.emplace(v, Polynomial(q));
  return out;
}

/// Exact check of the full PCP and every C-finite constraint at n < l.
bool final_check(const Pcp& pcp, const std::vector<CFiniteConstraint>& cfcs, const Model& model) {
  bool complete = recheck(pcp, model);
  auto bindings = as_bindings(model);
  for (const auto& cfc : cfcs) {
    for (unsigned n = 0; n < cfc.length(); ++n) {
      Polynomial value = cfc.instance(n).substitute(bindings);
      auto vars = value.variables();
      bool open = std::any_of(vars.begin(), vars.end(), [](const Var& v) { return v.kind != VarKind::Param; });
      if (open) {
        complete = false;
        continue;
      }
      if (!value.is_zero()) {
        throw SolverError(SolverError::Kind::ModelCheck, "model violates C-finite constraint " + cfc.to_string() +
                                                             " at n = " + std::to_string(n));
      }
    }
  }
  return complete;
}

class Deadline {
 public:
  explicit Deadline(double seconds)
      : end_(std::chrono::steady_clock::now() + std::chrono::milliseconds(static_cast<long long>(seconds * 1000))) {}
  double left() const { return std::chrono::duration<double>(end_ - std::chrono::steady_clock::now()).count(); }

 private:
  std::chrono::steady_clock::time_point end_;
};

SolverConfig with_budget(const SolverConfig& cfg, const Deadline& deadline) {
  SolverConfig c = cfg;
  c.timeout_seconds = std::max(0.5, deadline.left());
  return c;
}

}  // namespace

SolveResult solve_cfinite(const Pcp& pcp, const std::vector<CFiniteConstraint>& cfcs, const SolverConfig& cfg,
                          CFiniteTrace* trace) {
  CFiniteTrace local;
  CFiniteTrace& tr = trace != nullptr ? *trace : local;
  tr = CFiniteTrace{};
  Deadline deadline(cfg.timeout_seconds);

  CFiniteSetup setup;
  setup.hard.symbols = pcp.symbols;
  setup.hard.params = pcp.params;
  for (const auto& c : pcp.clauses) {
    if (c.group != ClauseGroup::Alg && !c.soft) setup.hard.add(c);
  }
  for (const auto& cfc : cfcs) {
    std::vector<std::pair<std::size_t, Polynomial>> row;
    for (const auto& [w, u] : cfc.terms) row.emplace_back(base_index(setup.bases, w), u);
    setup.terms.push_back(std::move(row));
  }
  for (const auto& b : setup.bases) tr.bases.push_back(b.is_one() ? "1" : b.to_string());

  auto finish = [&](SolveResult r, int step) {
    if (r.status == SolveStatus::Sat) {
      r.inexact = !final_check(pcp, cfcs, r.model) || r.inexact;
      tr.step = step;
    }
    return r;
  };

  // Step 1: every u_i = 0 as soft constraints.
  std::vector<Clause> softs;
  for (const auto& row : setup.terms) {
    for (const auto& [bi, u] : row) {
      for (auto& q : decompose_polynomial(u, pcp.params)) {
        Clause c = Clause::eq(q, ClauseGroup::Alg);
        c.soft = true;
        softs.push_back(std::move(c));
      }
    }
  }
  if (setup.bases.empty()) return finish(solve(setup.hard, with_budget(cfg, deadline)), 1);

  std::optional<Model> sigma;
  bool all_soft_failed_known = false;
  SolverConfig no_cores = cfg;
  no_cores.supports_cores = false;
  if (cfg.supports_soft) {
    // Optimizing over nonlinear reals is far slower than deciding, so step 1 is
    // decided with hard equations and the soft query only picks sigma.
    Pcp all = setup.hard;
    for (auto s : softs) {
      s.soft = false;
      all.add(s);
    }
    SolveResult r = solve(all, with_budget(no_cores, deadline));
    if (r.status == SolveStatus::Sat) return finish(r, 1);
    if (r.status == SolveStatus::Timeout) return r;
    all_soft_failed_known = r.status == SolveStatus::Unsat;
    SolverConfig capped = with_budget(no_cores, deadline);
    capped.timeout_seconds = std::min(2.0, deadline.left() / 4);
    r = SolveResult{};
    if (capped.timeout_seconds >= 0.25) {
      Pcp q = setup.hard;
      for (const auto& s : softs) q.add(s);
      r = solve(q, capped);
    }
    if (r.status != SolveStatus::Sat) r = solve(setup.hard, with_budget(no_cores, deadline));
    if (r.status == SolveStatus::Unsat) {
      r.detail = "hard constraints unsatisfiable";
      return r;
    }
    if (r.status == SolveStatus::Sat) sigma = r.model;
  } else {
    std::vector<bool> active(softs.size(), true);
    bool dropped = false;
    while (true) {
      Pcp q = setup.hard;
      std::map<std::string, std::size_t> soft_label;
      for (std::size_t i = 0; i < softs.size(); ++i) {
        if (!active[i]) continue;
        Clause c = softs[i];
        c.soft = false;
        std::size_t before = q.clauses.size();
        q.add(c);
        if (q.clauses.size() > before) soft_label.emplace(clause_label(before), i);
      }
      SolveResult r = solve(q, with_budget(cfg, deadline));
      if (r.status == SolveStatus::Sat) {
        if (!dropped) return finish(r, 1);
        sigma = r.model;
        all_soft_failed_known = true;
        break;
      }
      if (r.status == SolveStatus::Timeout) return r;
      if (r.status == SolveStatus::Unknown) break;
      std::optional<std::size_t> victim;
      for (const auto& label : r.core) {
        auto it = soft_label.find(label);
        if (it != soft_label.end() && (!victim || it->second < *victim)) victim = it->second;
      }
      if (!victim) {
        if (!r.has_core && !soft_label.empty()) {
          victim = soft_label.begin()->second;
        } else {
          r.detail = "hard constraints unsatisfiable";
          return r;
        }
      }
      active[*victim] = false;
      dropped = true;
    }
  }

  // Step 2: the partition induced by the model's values of the bases.
  std::optional<std::vector<std::size_t>> sigma_rgs;
  if (sigma) {
    auto values = sigma->rational_values();
    std::vector<Rational> wv;
    bool ok = true;
    for (const auto& b : setup.bases) {
      Polynomial bp(b, Rational(1));
      if (!covered(bp.variables(), values)) {
        ok = false;
        break;
      }
      wv.push_back(bp.evaluate(values));
    }
    if (ok) {
      std::vector<std::size_t> rgs(wv.size());
      std::vector<Rational> reps;
      for (std::size_t i = 0; i < wv.size(); ++i) {
        auto it = std::find(reps.begin(), reps.end(), wv[i]);
        rgs[i] = static_cast<std::size_t>(it - reps.begin());
        if (it == reps.end()) reps.push_back(wv[i]);
      }
      sigma_rgs = rgs;
    }
  }

  std::vector<std::set<std::string>> learned;
  bool saw_unknown = false;
  std::optional<SolveResult> found;
  std::optional<SolveResult> fatal;
  const std::size_t l = setup.bases.size();

  auto attempt = [&](const std::vector<std::size_t>& rgs, int step) -> bool {
    std::size_t blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    if (blocks == l && all_soft_failed_known) {
      ++tr.partitions_skipped;
      return true;
    }
    auto extra = partition_clauses(setup, rgs, pcp.params);
    std::set<std::string> keys;
    for (const auto& c : extra) keys.insert(c.to_string());
    for (const auto& core : learned) {
      if (std::includes(keys.begin(), keys.end(), core.begin(), core.end())) {
        ++tr.partitions_skipped;
        return true;
      }
    }
    if (deadline.left() <= 0) {
      SolveResult t;
      t.status = SolveStatus::Timeout;
      t.detail = "budget exhausted during partition search";
      fatal = t;
      return false;
    }
    Pcp q = setup.hard;
    std::size_t hard_count = q.clauses.size();
    q.add_all(extra);
    ++tr.partitions_tried;
    SolveResult r = solve(q, with_budget(cfg, deadline));
    if (r.status == SolveStatus::Sat) {
      tr.partition = partition_text(rgs);
      found = finish(r, step);
      return false;
    }
    if (r.status == SolveStatus::Unsat) {
      std::set<std::string> core;
      bool hard_only = r.has_core;
      for (const auto& label : r.core) {
        std::size_t idx = std::stoul(label.substr(1));
        if (idx >= hard_count && idx < q.clauses.size()) {
          core.insert(q.clauses[idx].to_string());
          hard_only = false;
        }
      }
      if (hard_only) {
        r.detail = "hard constraints unsatisfiable";
        fatal = r;
        return false;
      }
      learned.push_back(r.has_core ? core : keys);
      return true;
    }
    if (r.status == SolveStatus::Timeout) {
      fatal = r;
      return false;
    }
    saw_unknown = true;
    return true;
  };

  bool go_on = true;
  if (sigma_rgs) go_on = attempt(*sigma_rgs, 2);
  if (go_on) {
    for_each_set_partition(l, [&](const std::vector<std::size_t>& rgs) {
      if (sigma_rgs && rgs == *sigma_rgs) return true;
      return attempt(rgs, 3);
    });
  }
  if (found) return *found;
  if (fatal) return *fatal;
  SolveResult r;
  r.status = saw_unknown ? SolveStatus::Unknown : SolveStatus::Unsat;
  r.detail = "partition space exhausted";
  return r;
}

}  // namespace loopsynth

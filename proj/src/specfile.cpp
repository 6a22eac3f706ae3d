#include "loopsynth/specfile.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace loopsynth {

bool SpecFile::has_tag(const std::string& tag) const { return std::find(tags.begin(), tags.end(), tag) != tags.end(); }

namespace {

struct Word {
  std::string text;
  std::size_t column;
};

std::vector<Word> words(const std::string& line, std::size_t from) {
  std::vector<Word> out;
  std::size_t i = from;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) != 0) ++i;
    if (i == line.size()) break;
    std::size_t start = i;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) == 0) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

bool identifier(const std::string& s) {
  if (s.empty() || (std::isalpha(static_cast<unsigned char>(s[0])) == 0 && s[0] != '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; });
}

std::pair<std::string, std::string> split_eq(const Word& w, std::size_t line) {
  auto eq = w.text.find('=');
  if (eq == std::string::npos) return {w.text, ""};
  if (eq == 0 || eq + 1 == w.text.size()) throw ParseError("malformed binding '" + w.text + "'", line, w.column);
  return {w.text.substr(0, eq), w.text.substr(eq + 1)};
}

std::string format_number(double d) {
  std::ostringstream out;
  out << d;
  return out.str();
}

}  // namespace

Resolver spec_resolver(const SpecFile& spec) {
  std::map<std::string, Var> table;
  int rank = 0;
  for (const auto& v : spec.vars) table.emplace(v, Var(v, VarKind::Program, rank++));
  for (const auto& p : spec.params) table.emplace(p.name, Var(p.name, VarKind::Param, rank++));
  for (const auto& [sym, var] : spec.initial) table.emplace(sym, Var(sym, VarKind::Param, rank++));
  return [table](const std::string& name) -> Var {
    auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown identifier '" + name + "'");
    return it->second;
  };
}

SpecFile parse_spec(std::string_view text) {
  SpecFile spec;
  std::set<std::string> declared;
  std::vector<std::pair<std::size_t, std::size_t>> invariant_pos;
  auto declare = [&](const Word& w, std::size_t line, const std::string& what) {
    if (!identifier(w.text)) throw ParseError("bad " + what + " name '" + w.text + "'", line, w.column);
    if (!declared.insert(w.text).second) throw ParseError("'" + w.text + "' declared twice", line, w.column);
  };
  auto need_var = [&](const std::string& name, const Word& w, std::size_t line) {
    if (std::find(spec.vars.begin(), spec.vars.end(), name) == spec.vars.end()) {
      throw ParseError("'" + name + "' is not a declared variable", line, w.column);
    }
  };

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto ws = words(line, 0);
    if (ws.empty() || ws[0].text[0] == '#') continue;
    const std::string key = ws[0].text;
    std::vector<Word> args(ws.begin() + 1, ws.end());
    auto one = [&]() -> const Word& {
      if (args.size() != 1) throw ParseError("'" + key + "' takes one value", lineno, ws[0].column);
      return args[0];
    };
    if (key == "name") {
      spec.name = one().text;
    } else if (key == "vars") {
      if (!spec.vars.empty()) throw ParseError("variables declared twice", lineno, ws[0].column);
      if (args.empty()) throw ParseError("no variables", lineno, ws[0].column);
      for (const auto& w : args) {
        declare(w, lineno, "variable");
        spec.vars.push_back(w.text);
      }
    } else if (key == "params") {
      for (const auto& w : args) {
        auto [name, var] = split_eq(w, lineno);
        declare(Word{name, w.column}, lineno, "parameter");
        if (!var.empty()) need_var(var, w, lineno);
        spec.params.push_back({name, var});
      }
    } else if (key == "initial") {
      for (const auto& w : args) {
        auto [name, var] = split_eq(w, lineno);
        if (var.empty()) throw ParseError("expected symbol=variable", lineno, w.column);
        declare(Word{name, w.column}, lineno, "symbol");
        need_var(var, w, lineno);
        spec.initial.emplace_back(name, var);
      }
    } else if (key == "init") {
      for (const auto& w : args) {
        auto [var, value] = split_eq(w, lineno);
        if (value.empty()) throw ParseError("expected variable=value", lineno, w.column);
        need_var(var, w, lineno);
        try {
          spec.init.emplace_back(var, parse_rational(value));
        } catch (const std::exception&) {
          throw ParseError("bad number '" + value + "'", lineno, w.column + var.size() + 1);
        }
      }
    } else if (key == "invariant") {
      if (args.empty()) throw ParseError("empty invariant", lineno, ws[0].column);
      std::size_t start = args[0].column - 1;
      std::string body = line.substr(start);
      while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())) != 0) body.pop_back();
      spec.invariants.push_back(body);
      invariant_pos.emplace_back(lineno, start);
    } else if (key == "size") {
      const Word& w = one();
      if (w.text.empty() || !std::all_of(w.text.begin(), w.text.end(), ::isdigit) || w.text.size() > 3) {
        throw ParseError("bad size '" + w.text + "'", lineno, w.column);
      }
      spec.size = std::stoul(w.text);
    } else if (key == "tiers") {
      if (args.empty()) throw ParseError("no tiers", lineno, ws[0].column);
      for (const auto& w : args) {
        if (w.text == "auto") {
          spec.tiers.clear();
          continue;
        }
        try {
          spec.tiers.push_back(parse_tier(w.text));
        } catch (const std::invalid_argument&) {
          throw ParseError("unknown tier '" + w.text + "'", lineno, w.column);
        }
      }
    } else if (key == "aux-one") {
      if (!args.empty()) throw ParseError("'aux-one' takes no value", lineno, args[0].column);
      spec.aux_one = true;
    } else if (key == "timeout") {
      const Word& w = one();
      double t = 0;
      try {
        std::size_t used = 0;
        t = std::stod(w.text, &used);
        if (used != w.text.size()) t = 0;
      } catch (const std::exception&) {
      }
      if (!(t > 0)) throw ParseError("bad timeout '" + w.text + "'", lineno, w.column);
      spec.timeout = t;
    } else if (key == "solver") {
      spec.solver = one().text;
    } else if (key == "partition") {
      const Word& w = one();
      try {
        spec.partition = IntegerPartition::parse(w.text);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lineno, w.column);
      }
    } else if (key == "order") {
      if (!spec.order.empty()) throw ParseError("order given twice", lineno, ws[0].column);
      for (const auto& w : args) {
        need_var(w.text, w, lineno);
        if (std::find(spec.order.begin(), spec.order.end(), w.text) != spec.order.end()) {
          throw ParseError("'" + w.text + "' repeated in order", lineno, w.column);
        }
        spec.order.push_back(w.text);
      }
      if (spec.order.size() != spec.vars.size()) throw ParseError("order must list every variable", lineno, ws[0].column);
    } else if (key == "tag") {
      for (const auto& w : args) {
        if (!spec.has_tag(w.text)) spec.tags.push_back(w.text);
      }
    } else {
      throw ParseError("unknown keyword '" + key + "'", lineno, ws[0].column);
    }
  }
  if (spec.vars.empty()) throw ParseError("missing 'vars'", lineno + 1, 1);
  if (spec.invariants.empty()) throw ParseError("missing 'invariant'", lineno + 1, 1);
  Resolver res = spec_resolver(spec);
  for (std::size_t k = 0; k < spec.invariants.size(); ++k) {
    auto [line_no, offset] = invariant_pos[k];
    try {
      parse_conjunction(spec.invariants[k], res, line_no);
    } catch (const ParseError& e) {
      std::string msg = e.what();
      msg = msg.substr(msg.find(": ") + 2);
      throw ParseError(msg, line_no, e.column() + offset);
    }
  }
  std::size_t s = spec.size.value_or(spec.vars.size() + (spec.aux_one ? 1 : 0));
  if (spec.partition && spec.partition->sum() != s) {
    throw ParseError("partition does not sum to the size", lineno + 1, 1);
  }
  return spec;
}

std::string print_spec(const SpecFile& spec) {
  std::ostringstream out;
  auto list = [&](const char* key, const std::vector<std::string>& items) {
    if (items.empty()) return;
    out << key;
    for (const auto& i : items) out << " " << i;
    out << "\n";
  };
  if (!spec.name.empty()) out << "name " << spec.name << "\n";
  list("vars", spec.vars);
  std::vector<std::string> items;
  for (const auto& p : spec.params) items.push_back(p.var.empty() ? p.name : p.name + "=" + p.var);
  list("params", items);
  items.clear();
  for (const auto& [sym, var] : spec.initial) items.push_back(sym + "=" + var);
  list("initial", items);
  items.clear();
  for (const auto& [var, q] : spec.init) items.push_back(var + "=" + to_string(q));
  list("init", items);
  for (const auto& inv : spec.invariants) out << "invariant " << inv << "\n";
  if (spec.size) out << "size " << *spec.size << "\n";
  items.clear();
  for (auto t : spec.tiers) items.emplace_back(to_string(t));
  list("tiers", items);
  if (spec.aux_one) out << "aux-one\n";
  if (spec.timeout) out << "timeout " << format_number(*spec.timeout) << "\n";
  if (!spec.solver.empty()) out << "solver " << spec.solver << "\n";
  if (spec.partition) out << "partition " << spec.partition->to_string() << "\n";
  list("order", spec.order);
  list("tag", spec.tags);
  return out.str();
}

SynthRequest to_request(const SpecFile& spec, const SolverConfig& solver) {
  Resolver res = spec_resolver(spec);
  SynthRequest req;
  for (const auto& v : spec.vars) req.vars.push_back(res(v));
  for (const auto& p : spec.params) {
    ParamBinding b{res(p.name), std::nullopt};
    if (!p.var.empty()) b.var = res(p.var);
    req.params.push_back(b);
  }
  for (const auto& [sym, var] : spec.initial) req.initial_symbols.emplace(res(sym), res(var));
  for (const auto& [var, q] : spec.init) req.pinned_inits[res(var)] = q;
  for (const auto& inv : spec.invariants) {
    auto ps = parse_conjunction(inv, res);
    req.invariants.insert(req.invariants.end(), ps.begin(), ps.end());
  }
  req.size = spec.size;
  if (!spec.tiers.empty()) req.tiers = spec.tiers;
  req.aux_one = spec.aux_one;
  req.partition = spec.partition;
  if (!spec.order.empty()) {
    std::vector<Var> order;
    for (const auto& v : spec.order) order.push_back(res(v));
    req.permutation = order;
  }
  req.solver = spec.solver.empty() ? solver : SolverConfig::for_executable(spec.solver);
  if (spec.timeout) req.timeout_seconds = *spec.timeout;
  return req;
}

}  // namespace loopsynth

#include "loopsynth/bench.hpp"
#include "loopsynth/specfile.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace loopsynth;
using nlohmann::json;

namespace {

enum Exit : int {
  kFound = 0,
  kFails = 1,
  kNotFound = 2,
  kExhausted = 3,
  kParseError = 4,
  kSolverError = 5,
  kInternal = 6,
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json matrix_json(const SymMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).to_string());
    rows.push_back(row);
  }
  return rows;
}

json loop_json(const SynthLoop& l, const std::string& text) {
  json vars = json::array();
  for (const auto& v : l.loop.vars) vars.push_back(v.name);
  json init = json::array();
  for (std::size_t i = 0; i < l.loop.size(); ++i) init.push_back(l.loop.init.at(i, 0).to_string());
  json out{{"tier", to_string(l.cell.tier)},
           {"partition", l.cell.partition.to_string()},
           {"vars", vars},
           {"init", init},
           {"update", matrix_json(l.loop.update)},
           {"step", l.step},
           {"millis", l.millis},
           {"bound", l.bound},
           {"text", text}};
  if (l.loop.constant_index) out["constant"] = l.loop.vars[*l.loop.constant_index].name;
  return out;
}

struct SynthFlags {
  std::string spec;
  std::string solver;
  double timeout = 0;
  std::string tier;
  std::string partition;
  std::vector<std::string> order;
  std::size_t size = 0;
  bool aux_one = false;
  std::size_t count = 1;
  std::string emit;
  bool json_out = false;
};

int cmd_synth(const SynthFlags& f) {
  SpecFile spec = parse_spec(read_file(f.spec));
  if (!f.solver.empty()) spec.solver = f.solver;
  if (f.timeout > 0) spec.timeout = f.timeout;
  if (!f.tier.empty()) {
    spec.tiers.clear();
    if (f.tier != "auto") spec.tiers.push_back(parse_tier(f.tier));
  }
  if (!f.partition.empty()) spec.partition = IntegerPartition::parse(f.partition);
  if (!f.order.empty()) spec.order = f.order;
  if (f.size > 0) spec.size = f.size;
  if (f.aux_one) spec.aux_one = true;
  SynthRequest req = to_request(spec);
  req.count = f.count;

  if (!f.emit.empty()) {
    auto cells = search_cells(req);
    if (cells.empty()) throw std::invalid_argument("no search cell matches the options");
    CellProblem prob = build_cell(req, cells.front());
    EmitOptions opt;
    opt.get_values = true;
    write_output(f.emit, "; " + cells.front().to_string() + "\n" + emit_smtlib(prob.pcp, opt));
    return kFound;
  }

  SynthResult r = synthesize(req);
  std::vector<std::string> texts;
  for (const auto& l : r.loops) {
    std::string body = render_loop(l.loop, LoopStyle::Auto, spec.name.empty() ? "loop" : spec.name);
    std::size_t first = body.find('\n') + 1;
    std::ostringstream meta;
    meta << "# " << l.cell.to_string() << ", step " << l.step << ", " << static_cast<long>(l.millis) << " ms\n";
    std::string text = body.substr(0, first) + meta.str() + body.substr(first);
    for (const auto& inv : spec.invariants) text += "invariant " + inv + "\n";
    texts.push_back(text);
  }
  if (f.json_out) {
    json loops = json::array();
    for (std::size_t i = 0; i < r.loops.size(); ++i) loops.push_back(loop_json(r.loops[i], texts[i]));
    json out{{"status", to_string(r.status)}, {"cells_tried", r.cells_tried}, {"detail", r.detail}, {"loops", loops}};
    std::cout << out.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < texts.size(); ++i) std::cout << (i > 0 ? "\n" : "") << texts[i];
    if (r.loops.empty()) std::cerr << to_string(r.status) << ": " << r.detail << "\n";
  }
  switch (r.status) {
    case SynthStatus::Found: return kFound;
    case SynthStatus::NotFound: return kNotFound;
    case SynthStatus::Exhausted: return kExhausted;
  }
  return kInternal;
}

std::vector<Polynomial> loop_invariants(const LoopFile& file, const std::vector<std::string>& extra) {
  const auto& texts = extra.empty() ? file.invariants : extra;
  if (texts.empty()) throw std::invalid_argument("no invariant given");
  Resolver res = loop_resolver(file.loop);
  std::vector<Polynomial> out;
  for (const auto& t : texts) {
    auto ps = parse_conjunction(t, res);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

int cmd_verify(const std::string& path, const std::vector<std::string>& invariants, bool json_out) {
  LoopFile file = parse_loop(read_file(path));
  Verdict v = check_invariants(file.loop, loop_invariants(file, invariants));
  if (json_out) {
    json out{{"holds", v.holds}, {"bound", v.bound_used}};
    if (v.witness) out["witness"] = json{{"n", v.witness->n}, {"value", v.witness->value.to_string()}};
    std::cout << out.dump(2) << "\n";
  } else if (v.holds) {
    std::cout << "holds (checked " << v.bound_used << " iterations)\n";
  } else {
    std::cout << "fails at n = " << v.witness->n << ": value " << v.witness->value.to_string() << "\n";
  }
  return v.holds ? kFound : kFails;
}

int cmd_equiv(const std::string& a_path, const std::string& b_path, const std::string& invariant,
              const std::vector<std::string>& renames) {
  LoopFile a = parse_loop(read_file(a_path));
  LoopFile b = parse_loop(read_file(b_path));
  auto ps = parse_conjunction(invariant, loop_resolver(a.loop));
  Resolver in_b = loop_resolver(b.loop);
  Resolver in_a = loop_resolver(a.loop);
  std::map<Var, Var> rename;
  for (const auto& r : renames) {
    auto eq = r.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected a=b in --rename, got '" + r + "'");
    rename[in_a(r.substr(0, eq))] = in_b(r.substr(eq + 1));
  }
  if (renames.empty()) {
    for (const auto& p : ps) {
      for (const auto& v : p.variables()) {
        if (v.kind != VarKind::Param) rename[v] = in_b(v.name);
      }
    }
  }
  bool all = true;
  for (const auto& p : ps) all = all && check_equiv_modulo(a.loop, b.loop, p, rename);
  std::cout << (all ? "equivalent" : "not equivalent") << "\n";
  return all ? kFound : kFails;
}

int cmd_bench(const std::string& dir, const std::string& csv, unsigned jobs, double timeout, const std::string& solver,
              const std::vector<std::string>& skip) {
  BenchOptions opt;
  if (!solver.empty()) opt.solver = SolverConfig::for_executable(solver);
  if (timeout > 0) opt.timeout = timeout;
  opt.jobs = jobs;
  opt.skip_tags = skip;
  auto rows = run_bench(dir, opt);
  if (!csv.empty()) write_output(csv, bench_csv(rows));
  if (csv != "-") std::cout << bench_table(rows);
  return kFound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesizes affine loops from polynomial invariants"};
  app.require_subcommand(1);

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Synthesize a loop for a spec file");
  synth->add_option("spec", sf.spec, "Spec file")->required();
  synth->add_option("--solver", sf.solver, "Solver executable (default: $LOOPSYNTH_SOLVER or z3)");
  synth->add_option("--timeout", sf.timeout, "Seconds for the whole search (default 60)");
  synth->add_option("--tier", sf.tier, "un, up, fu or auto")->check(CLI::IsMember({"un", "up", "fu", "auto"}));
  synth->add_option("--partition", sf.partition, "Eigenvalue multiplicities, e.g. 2,1");
  synth->add_option("--order", sf.order, "Fixed variable order, e.g. d,a,b,c")->delimiter(',');
  synth->add_option("--size", sf.size, "Number of template variables");
  synth->add_flag("--aux-one", sf.aux_one, "Add a variable that stays 1");
  synth->add_option("--count", sf.count, "Number of distinct loops")->check(CLI::PositiveNumber);
  synth->add_option("--emit-smt2", sf.emit, "Write the first cell's constraints to a file (- for stdout) and stop");
  synth->add_flag("--json", sf.json_out, "JSON output");

  std::string loop_path;
  std::vector<std::string> invariants;
  bool verify_json = false;
  auto* verify = app.add_subcommand("verify", "Check invariants of a loop file");
  verify->add_option("loop", loop_path, "Loop file")->required();
  verify->add_option("--invariant", invariants, "Invariant (default: the file's invariant lines)");
  verify->add_flag("--json", verify_json, "JSON output");

  std::string a_path, b_path, equiv_inv;
  std::vector<std::string> renames;
  auto* equiv = app.add_subcommand("equiv", "Check that two loops share an invariant");
  equiv->add_option("first", a_path, "Loop file")->required();
  equiv->add_option("second", b_path, "Loop file")->required();
  equiv->add_option("--invariant", equiv_inv, "Invariant over the first loop's variables")->required();
  equiv->add_option("--rename", renames, "Variable map a=b (default: same names)")->delimiter(',');

  std::string dir, csv, bench_solver;
  unsigned jobs = 1;
  double bench_timeout = 0;
  std::vector<std::string> skip;
  auto* bench = app.add_subcommand("bench", "Synthesize every *.spec file of a directory");
  bench->add_option("dir", dir, "Corpus directory")->required();
  bench->add_option("--csv", csv, "Write CSV to a file (- for stdout)");
  bench->add_option("--jobs", jobs, "Concurrent instances")->check(CLI::PositiveNumber);
  bench->add_option("--timeout", bench_timeout, "Seconds per instance");
  bench->add_option("--solver", bench_solver, "Solver executable");
  bench->add_option("--skip-tag", skip, "Skip instances with this tag");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(sf);
    if (*verify) return cmd_verify(loop_path, invariants, verify_json);
    if (*equiv) return cmd_equiv(a_path, b_path, equiv_inv, renames);
    if (*bench) return cmd_bench(dir, csv, jobs, bench_timeout, bench_solver, skip);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) {
      std::cerr << "error: " << e.what() << "\n";
      return kParseError;
    }
    std::cerr << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  }
  return kInternal;
}

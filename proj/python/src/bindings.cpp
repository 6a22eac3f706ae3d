#include "loopsynth/bench.hpp"
#include "loopsynth/specfile.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace loopsynth;

namespace {

py::dict loop_dict(const SynthLoop& l, const std::string& name) {
  py::list vars, init, update;
  for (const auto& v : l.loop.vars) vars.append(v.name);
  for (std::size_t i = 0; i < l.loop.size(); ++i) {
    init.append(l.loop.init.at(i, 0).to_string());
    py::list row;
    for (std::size_t j = 0; j < l.loop.size(); ++j) row.append(l.loop.update.at(i, j).to_string());
    update.append(row);
  }
  py::dict d;
  d["text"] = render_loop(l.loop, LoopStyle::Auto, name);
  d["tier"] = to_string(l.cell.tier);
  d["partition"] = l.cell.partition.to_string();
  d["step"] = l.step;
  d["millis"] = l.millis;
  d["vars"] = vars;
  d["init"] = init;
  d["update"] = update;
  return d;
}

py::dict row_dict(const BenchRow& r) {
  py::dict d;
  d["instance"] = r.instance;
  d["status"] = r.status;
  d["tier"] = r.tier;
  d["partition"] = r.partition;
  d["permutation"] = r.permutation;
  d["millis"] = r.millis;
  d["verified"] = r.verified;
  d["detail"] = r.detail;
  return d;
}

BenchOptions bench_options(std::optional<double> timeout, unsigned jobs, const std::vector<std::string>& skip,
                           const std::string& solver) {
  BenchOptions opt;
  if (!solver.empty()) opt.solver = SolverConfig::for_executable(solver);
  opt.timeout = timeout;
  opt.jobs = jobs;
  opt.skip_tags = skip;
  return opt;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Affine loop synthesis from polynomial invariants";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def(
      "synthesize",
      [](const std::string& spec_text, std::optional<double> timeout, const std::string& solver, std::size_t count) {
        SpecFile spec = parse_spec(spec_text);
        if (!solver.empty()) spec.solver = solver;
        if (timeout) spec.timeout = timeout;
        SynthRequest req = to_request(spec);
        req.count = count;
        SynthResult r;
        {
          py::gil_scoped_release release;
          r = synthesize(req);
        }
        py::list loops;
        for (const auto& l : r.loops) loops.append(loop_dict(l, spec.name.empty() ? "loop" : spec.name));
        py::dict d;
        d["status"] = to_string(r.status);
        d["detail"] = r.detail;
        d["cells_tried"] = r.cells_tried;
        d["loops"] = loops;
        return d;
      },
      py::arg("spec_text"), py::arg("timeout") = py::none(), py::arg("solver") = "", py::arg("count") = 1,
      "Synthesize loops for a spec given as text.");

  m.def(
      "verify",
      [](const std::string& loop_text, const std::vector<std::string>& invariants) {
        LoopFile file = parse_loop(loop_text);
        const auto& texts = invariants.empty() ? file.invariants : invariants;
        if (texts.empty()) throw std::invalid_argument("no invariant given");
        std::vector<Polynomial> ps;
        for (const auto& t : texts) {
          auto c = parse_conjunction(t, loop_resolver(file.loop));
          ps.insert(ps.end(), c.begin(), c.end());
        }
        Verdict v = check_invariants(file.loop, ps);
        py::dict d;
        d["holds"] = v.holds;
        d["bound"] = v.bound_used;
        if (v.witness) {
          d["n"] = v.witness->n;
          d["value"] = v.witness->value.to_string();
        }
        return d;
      },
      py::arg("loop_text"), py::arg("invariants") = std::vector<std::string>{},
      "Check a loop file's invariants, or the given ones, exactly.");

  m.def(
      "bench",
      [](const std::string& dir, std::optional<double> timeout, unsigned jobs, const std::vector<std::string>& skip,
         const std::string& solver) {
        std::vector<BenchRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_bench(dir, bench_options(timeout, jobs, skip, solver));
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("dir"), py::arg("timeout") = py::none(), py::arg("jobs") = 1,
      py::arg("skip_tags") = std::vector<std::string>{}, py::arg("solver") = "");

  m.def(
      "bench_csv",
      [](const std::string& dir, std::optional<double> timeout, unsigned jobs, const std::vector<std::string>& skip,
         const std::string& solver) {
        py::gil_scoped_release release;
        return bench_csv(run_bench(dir, bench_options(timeout, jobs, skip, solver)));
      },
      py::arg("dir"), py::arg("timeout") = py::none(), py::arg("jobs") = 1,
      py::arg("skip_tags") = std::vector<std::string>{}, py::arg("solver") = "");

  m.def(
      "int_partitions",
      [](unsigned s) {
        std::vector<std::vector<unsigned>> out;
        for (const auto& p : int_partitions(s)) out.push_back(p.parts);
        return out;
      },
      py::arg("s"));
}

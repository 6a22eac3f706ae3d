#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loopsynth/bench.hpp"
#include "loopsynth/specfile.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#ifndef CORPUS_DIR
#define CORPUS_DIR "corpus"
#endif
#ifndef FAKE_SOLVER_DIR
#define FAKE_SOLVER_DIR "."
#endif
#ifndef LOOPSYNTH_CLI
#define LOOPSYNTH_CLI "loopsynth"
#endif

using namespace loopsynth;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("loopsynth_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  fs::path out = scratch("stdout.txt");
  std::string cmd = std::string(LOOPSYNTH_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::string collapse(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) == 0) out += c;
  }
  return out;
}

}  // namespace

TEST_CASE("spec files: parse, print, parse is a fixpoint") {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(fs::path(CORPUS_DIR) / "instances")) files.push_back(e.path());
  REQUIRE(files.size() >= 25);
  for (const auto& f : files) {
    CAPTURE(f.string());
    SpecFile a = parse_spec(slurp(f));
    std::string printed = print_spec(a);
    SpecFile b = parse_spec(printed);
    CHECK(print_spec(b) == printed);
    CHECK(b.vars == a.vars);
    CHECK(b.invariants == a.invariants);
    CHECK(b.aux_one == a.aux_one);
    CHECK(to_request(a).invariants == to_request(b).invariants);
  }

  std::string full =
      "# everything\nname demo\nvars x y z\nparams x0=x k\ninitial z0=z\ninit y=-3/4\n"
      "invariant x == x0 + k*y && z == z0\ninvariant y^2 == y^2\nsize 5\ntiers up fu\naux-one\n"
      "timeout 12.5\nsolver /opt/z3\npartition 3,2\norder z x y\ntag reconstructed extra\n";
  SpecFile s = parse_spec(full);
  CHECK(s.name == "demo");
  REQUIRE(s.params.size() == 2);
  CHECK(s.params[0].var == "x");
  CHECK(s.params[1].var.empty());
  CHECK(s.init[0].second == Rational(-3, 4));
  CHECK(s.tiers == std::vector<ShapeTier>{ShapeTier::UpperTriangular, ShapeTier::Full});
  CHECK(s.timeout == 12.5);
  CHECK(s.partition == IntegerPartition::parse("3,2"));
  CHECK(s.has_tag("reconstructed"));
  std::string printed = print_spec(s);
  CHECK(print_spec(parse_spec(printed)) == printed);
  SynthRequest req = to_request(s);
  CHECK(req.solver.executable == "/opt/z3");
  CHECK(req.size == std::optional<std::size_t>(5));
  CHECK(req.params[0].var->name == "x");
  CHECK(req.initial_symbols.size() == 1);
  CHECK(req.pinned_inits.begin()->second == Rational(-3, 4));
  REQUIRE(req.permutation);
  CHECK((*req.permutation)[0].name == "z");
  CHECK(req.invariants.size() == 3);
}

TEST_CASE("shipped invariants are the printed ones after whitespace normalization") {
  std::map<std::string, std::string> loops{{"cubes", "cubes.faulty"}, {"eucliddiv", "eucliddiv.orig"},
                                           {"intsqrt2", "intsqrt2.orig"}, {"intcbrt", "intcbrt.orig"},
                                           {"square", "square.orig"}, {"sum1", "sum1.orig"}};
  for (int i = 1; i <= 5; ++i) loops["fmi" + std::to_string(i)] = "fmi" + std::to_string(i) + ".orig";
  for (auto n : {"cube_conj", "squared_varied1", "square_conj", "cube_square", "sum_of_square", "squared_varied2"}) {
    loops[n] = std::string(n) + ".synth1";
  }
  for (const auto& [spec, loop] : loops) {
    CAPTURE(spec);
    SpecFile s = parse_spec(slurp(fs::path(CORPUS_DIR) / "instances" / (spec + ".spec")));
    LoopFile l = parse_loop(slurp(fs::path(CORPUS_DIR) / "loops" / (loop + ".loop")));
    REQUIRE(s.invariants.size() == 1);
    REQUIRE(l.invariants.size() == 1);
    CHECK(collapse(s.invariants[0]) == collapse(l.invariants[0]));
  }
}

TEST_CASE("spec errors carry positions") {
  auto where = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_spec(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(where("vars x y\ninvariant x == 2w\n") == std::pair<std::size_t, std::size_t>{2, 17});
  CHECK(where("vars x\nfrobnicate\ninvariant x\n").first == 2);
  CHECK(where("vars x x\ninvariant x\n") == std::pair<std::size_t, std::size_t>{1, 8});
  CHECK(where("vars x\nparams x0=q\ninvariant x\n").first == 2);
  CHECK(where("vars x\ninit x=abc\ninvariant x\n").first == 2);
  CHECK(where("vars x\ninvariant x\ntiers un zz\n") == std::pair<std::size_t, std::size_t>{3, 10});
  CHECK(where("vars x\ninvariant x\nsize 2\npartition 2,1\n").first == 5);
  CHECK(where("vars x y\ninvariant x\norder x\n").first == 3);
  CHECK(where("invariant x == 1\n").first == 2);
  CHECK(where("vars x\n").first == 2);
}

TEST_CASE("bench CSV round-trips") {
  std::mt19937 rng(3);
  std::vector<BenchRow> rows;
  const char* statuses[] = {"found", "notfound", "exhausted", "error"};
  for (int i = 0; i < 40; ++i) {
    BenchRow r;
    r.instance = "inst" + std::to_string(i) + (i % 7 == 0 ? ",odd \"name\"" : "");
    r.status = statuses[rng() % 4];
    if (r.status == "found") {
      r.tier = "un";
      r.partition = i % 2 == 0 ? "3" : "2,1";
      r.permutation = "x y t";
      r.verified = true;
    }
    r.millis = static_cast<double>(rng() % 100000) / 10;
    rows.push_back(r);
  }
  auto back = parse_bench_csv(bench_csv(rows));
  CHECK(back == rows);
  CHECK(bench_csv({}) == "instance,status,tier,partition,permutation,millis,verified\n");
  CHECK(parse_bench_csv(bench_csv({})).empty());
  CHECK_THROWS_AS(parse_bench_csv("a,b\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_bench_csv(bench_csv({}) + "x,found,un,3,x,1.0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_bench_csv(bench_csv({}) + "x,found,un,3,x,1.0,maybe\n"), std::invalid_argument);
}

TEST_CASE("bench isolates failures and handles an empty directory") {
  fs::path empty = scratch("empty");
  fs::create_directories(empty);
  CHECK(run_bench(empty, {}).empty());
  CHECK(bench_table({}).find("instance") != std::string::npos);

  fs::path dir = scratch("mixed");
  fs::create_directories(dir);
  write(dir / "a_good.spec", "vars x y\ninvariant x == 2y\naux-one\ntiers un\n");
  write(dir / "b_broken.spec", "vars x\ninvariant x == q\n");
  write(dir / "c_const.spec", "vars x\ninvariant 1 == 0\n");
  write(dir / "d_skip.spec", "vars x y\ninvariant x == y\ntag reconstructed\n");
  write(dir / "notes.txt", "ignored\n");
  BenchOptions opt;
  opt.jobs = 3;
  opt.skip_tags = {"reconstructed"};
  auto rows = run_bench(dir, opt);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].instance == "a_good");
  CHECK(rows[0].status == "found");
  CHECK(rows[0].verified);
  CHECK(rows[0].tier == "un");
  CHECK(rows[1].status == "error");
  CHECK(rows[1].detail.find("q") != std::string::npos);
  CHECK(rows[2].status == "notfound");
  CHECK(parse_bench_csv(bench_csv(rows)) == rows);

  BenchOptions broken;
  broken.solver = SolverConfig::for_executable(std::string(FAKE_SOLVER_DIR) + "/garbage.sh");
  auto bad = run_bench(dir, broken);
  REQUIRE(bad.size() == 4);
  CHECK(bad[0].status == "error");
  CHECK(bad[2].status == "notfound");
}

TEST_CASE("command line exit codes and round trips") {
  const std::string inst = std::string(CORPUS_DIR) + "/instances/";
  Run synth = run("synth " + inst + "fmi1.spec");
  REQUIRE(synth.code == 0);
  fs::path out = scratch("fmi1.loop");
  write(out, synth.out);
  CHECK(run("verify " + out.string()).code == 0);
  CHECK(run("verify " + out.string() + " --invariant 'y == x'").code == 1);

  fs::path contra = scratch("contra.spec");
  write(contra, "vars x\ninvariant 1 == 0\n");
  CHECK(run("synth " + contra.string()).code == 2);

  fs::path bad = scratch("bad.spec");
  write(bad, "vars x\ninvariant x == nope\n");
  CHECK(run("synth " + bad.string()).code == 4);
  CHECK(run("synth " + scratch("missing.spec").string()).code == 4);

  fs::path slow = scratch("slow.spec");
  write(slow, "vars x y\ninvariant x == 2y\naux-one\n");
  CHECK(run("synth " + slow.string() + " --solver " + FAKE_SOLVER_DIR + "/garbage.sh").code == 5);
  CHECK(run("synth " + slow.string() + " --solver " + FAKE_SOLVER_DIR + "/sleepy.sh --timeout 2").code == 3);

  Run json = run("synth " + inst + "double2.spec --json --count 2");
  CHECK(json.code == 0);
  CHECK(json.out.find("\"status\": \"found\"") != std::string::npos);
  Run smt = run("synth " + inst + "double2.spec --emit-smt2 -");
  CHECK(smt.code == 0);
  CHECK(smt.out.find("(check-sat)") != std::string::npos);

  const std::string loops = std::string(CORPUS_DIR) + "/loops/";
  CHECK(run("verify " + loops + "fmi1.orig.loop").code == 0);
  CHECK(run("verify " + loops + "fmi1.synth1.loop").code == 0);
  CHECK(run("verify " + loops + "cubes.faulty.loop").code == 1);
  CHECK(run("equiv " + loops + "fmi1.orig.loop " + loops + "fmi1.synth1.loop --invariant '2y == 3x(x - 1)'").code == 0);
  CHECK(run("equiv " + loops + "xyz.synth1.loop " + loops + "fmi1.synth1.loop --invariant 'c == a + b' --rename c=y,a=x,b=y")
            .code == 4);

  fs::path empty = scratch("empty_cli");
  fs::create_directories(empty);
  Run bench = run("bench " + empty.string() + " --csv -");
  CHECK(bench.code == 0);
  CHECK(bench.out == "instance,status,tier,partition,permutation,millis,verified\n");
}

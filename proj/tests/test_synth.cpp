#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loopsynth/parse.hpp"
#include "loopsynth/synth.hpp"
#include "support.hpp"

#include <chrono>
#include <set>

using namespace loopsynth;
using testsupport::pv;
using testsupport::RMatrix;

namespace {

SynthRequest request(const std::vector<std::string>& names, const std::string& invariant, bool aux) {
  SynthRequest req;
  int rank = 0;
  for (const auto& n : names) req.vars.push_back(pv(n, rank++));
  req.aux_one = aux;
  req.solver = SolverConfig::from_environment();
  req.timeout_seconds = 60;
  Resolver res = [&](const std::string& n) -> Var {
    for (const auto& v : req.vars) {
      if (v.name == n) return v;
    }
    for (const auto& p : req.params) {
      if (p.param.name == n) return p.param;
    }
    throw std::invalid_argument("unknown identifier " + n);
  };
  if (!invariant.empty()) req.invariants = parse_conjunction(invariant, res);
  return req;
}

Var param(SynthRequest& req, const std::string& name, const std::string& var) {
  Var p(name, VarKind::Param, 100 + static_cast<int>(req.params.size()));
  ParamBinding b{p, std::nullopt};
  for (const auto& v : req.vars) {
    if (v.name == var) b.var = v;
  }
  req.params.push_back(b);
  return p;
}

RMatrix rational_update(const AffineLoop& loop) {
  RMatrix u(loop.size(), std::vector<Rational>(loop.size()));
  for (std::size_t i = 0; i < loop.size(); ++i) {
    for (std::size_t j = 0; j < loop.size(); ++j) {
      REQUIRE(loop.update.at(i, j).is_constant());
      u[i][j] = loop.update.at(i, j).constant_term();
    }
  }
  return u;
}

/// Plain iteration with parameters fixed to `values`; every invariant must vanish.
bool holds_by_iteration(const AffineLoop& loop, const std::vector<Polynomial>& invs,
                        const std::map<Var, Rational>& values, std::size_t steps) {
  RMatrix u = rational_update(loop);
  std::vector<Rational> x;
  for (std::size_t i = 0; i < loop.size(); ++i) x.push_back(loop.init.at(i, 0).evaluate(values));
  for (std::size_t n = 0; n < steps; ++n) {
    auto env = values;
    for (std::size_t i = 0; i < loop.size(); ++i) env[loop.vars[i]] = x[i];
    for (const auto& p : invs) {
      if (p.evaluate(env) != 0) return false;
    }
    std::vector<Rational> y(x.size(), Rational(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) y[i] += u[i][j] * x[j];
    }
    x = y;
  }
  return true;
}

bool first_step_moves(const AffineLoop& loop, const std::map<Var, Rational>& values = {}) {
  RMatrix u = rational_update(loop);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    Rational next(0);
    for (std::size_t j = 0; j < loop.size(); ++j) next += u[i][j] * loop.init.at(j, 0).evaluate(values);
    if (next != loop.init.at(i, 0).evaluate(values)) return true;
  }
  return false;
}

void certify(const SynthLoop& found, const std::vector<Polynomial>& invs) {
  RMatrix inv;
  CHECK(testsupport::invert(rational_update(found.loop), inv));
  CHECK(holds_by_iteration(found.loop, invs, {}, 40));
  CHECK(first_step_moves(found.loop));
}

}  // namespace

TEST_CASE("double2 is found at the first tier and certified by iteration") {
  auto req = request({"x", "y"}, "x == 2y", true);
  auto r = synthesize(req);
  REQUIRE(r.status == SynthStatus::Found);
  REQUIRE(r.loops.size() == 1);
  CHECK(r.loops[0].cell.tier == ShapeTier::UnitUpperTriangular);
  CHECK(r.loops[0].loop.constant_index == std::optional<std::size_t>(2));
  certify(r.loops[0], req.invariants);
}

TEST_CASE("benchmarks with unit upper triangular solutions") {
  struct Case {
    std::vector<std::string> vars;
    std::string inv;
  };
  std::vector<Case> cases{
      {{"a", "b"}, "a == b^2"},
      {{"x", "y"}, "x == y^2 + y"},
      {{"c", "k", "m", "n"}, "c == n^3 && k == 3n^2 + 3n + 1 && m == 6n + 6"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.inv);
    auto req = request(c.vars, c.inv, true);
    req.tiers = {ShapeTier::UnitUpperTriangular};
    auto r = synthesize(req);
    REQUIRE(r.status == SynthStatus::Found);
    certify(r.loops[0], req.invariants);
  }
}

TEST_CASE("a nonzero constant invariant fails fast") {
  auto req = request({"x", "y"}, "", true);
  req.invariants = {Polynomial(1)};
  auto start = std::chrono::steady_clock::now();
  auto r = synthesize(req);
  CHECK(r.status == SynthStatus::NotFound);
  CHECK(r.cells_tried == 0);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 1);
}

TEST_CASE("nontriviality excludes loops that never move") {
  // Without a constant variable, x' = x + b y, y' = y keeps x == 2y only when
  // b y = 0, and then the state is fixed.
  auto req = request({"x", "y"}, "x == 2y", false);
  req.tiers = {ShapeTier::UnitUpperTriangular};
  req.avoid_trivial = false;
  auto loose = synthesize(req);
  REQUIRE(loose.status == SynthStatus::Found);
  CHECK_FALSE(first_step_moves(loose.loops[0].loop));

  req.avoid_trivial = true;
  CHECK(synthesize(req).status == SynthStatus::NotFound);

  req.tiers = {ShapeTier::UnitUpperTriangular, ShapeTier::UpperTriangular};
  auto strict = synthesize(req);
  REQUIRE(strict.status == SynthStatus::Found);
  CHECK(strict.loops[0].cell.tier == ShapeTier::UpperTriangular);
  certify(strict.loops[0], req.invariants);
}

TEST_CASE("one variable: the identity is the only loop keeping x == 3") {
  auto req = request({"x"}, "x == 3", false);
  req.avoid_trivial = false;
  auto r = synthesize(req);
  REQUIRE(r.status == SynthStatus::Found);
  CHECK(r.loops[0].loop.update.at(0, 0) == Polynomial(1));
  CHECK(r.loops[0].loop.init.at(0, 0) == Polynomial(3));
  req.avoid_trivial = true;
  CHECK(synthesize(req).status == SynthStatus::NotFound);
}

TEST_CASE("search order is deterministic and complete") {
  auto req = request({"a", "b", "c"}, "a == b", false);
  auto cells = search_cells(req);
  // 3! orders with [3], 3! orders times 3 partitions, one order times 3 partitions.
  CHECK(cells.size() == 6 + 18 + 3);
  auto again = search_cells(req);
  REQUIRE(again.size() == cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(cells[i].to_string() == again[i].to_string());
  CHECK(cells.front().to_string() == "un [3] (a,b,c)");
  CHECK(cells[1].to_string() == "un [3] (a,c,b)");
  CHECK(cells[5].to_string() == "un [3] (c,b,a)");
  CHECK(cells[6].tier == ShapeTier::UpperTriangular);
  CHECK(cells.back().tier == ShapeTier::Full);

  req.aux_one = true;
  req.size = 5;
  auto vars = template_vars(req);
  REQUIRE(vars.size() == 5);
  CHECK(vars[3].name == "u");
  CHECK(vars[4].name == "t");
  for (const auto& cell : search_cells(req)) CHECK(cell.order.back() == vars[4]);

  req.partition = IntegerPartition{{2, 2, 1}};
  for (const auto& cell : search_cells(req)) CHECK(cell.partition == *req.partition);
}

TEST_CASE("count k returns k distinct certified loops") {
  auto req = request({"x", "y"}, "x == 2y", true);
  req.count = 3;
  auto r = synthesize(req);
  REQUIRE(r.status == SynthStatus::Found);
  REQUIRE(r.loops.size() == 3);
  std::set<std::string> seen;
  for (const auto& l : r.loops) {
    certify(l, req.invariants);
    seen.insert(render_loop(l.loop));
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("eucliddiv with parameters holds for every parameter value") {
  auto req = request({"r", "q", "y"}, "", true);
  Var x0 = param(req, "x0", "r");
  Var y0 = param(req, "y0", "y");
  req.invariants = {Polynomial(x0) - Polynomial(y0) * Polynomial(pv("q", 1)) - Polynomial(pv("r", 0))};
  auto r = synthesize(req);
  REQUIRE(r.status == SynthStatus::Found);
  const auto& loop = r.loops[0].loop;
  CHECK(loop.params().size() >= 1);
  std::mt19937 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    std::map<Var, Rational> values{{x0, testsupport::random_rational(rng, -9, 9, 3)},
                                   {y0, testsupport::random_rational(rng, -9, 9, 3)}};
    CHECK(holds_by_iteration(loop, req.invariants, values, 25));
  }
  std::map<Var, Rational> generic{{x0, Rational(17)}, {y0, Rational(5)}};
  CHECK(first_step_moves(loop, generic));
}

TEST_CASE("loop_from_model rejects algebraic values") {
  auto req = request({"x", "y"}, "x == 2y", true);
  auto cells = search_cells(req);
  auto prob = build_cell(req, cells.front());
  Model m;
  auto unknowns = prob.tpl.b_unknowns();
  REQUIRE_FALSE(unknowns.empty());
  Var w("w", VarKind::Program, 50);
  AlgebraicTag tag;
  tag.defining = Polynomial(w) * Polynomial(w) - 2;
  tag.index = 1;
  m.values[unknowns.front()] = tag;
  CHECK_THROWS_AS(loop_from_model(prob.tpl, m, prob.constant_index), std::invalid_argument);
  m.values[unknowns.front()] = Rational(1);
  CHECK_NOTHROW(loop_from_model(prob.tpl, m, prob.constant_index));
}

TEST_CASE("request errors") {
  auto req = request({"x", "y"}, "x == 2y", false);
  req.size = 1;
  CHECK_THROWS_AS(search_cells(req), std::invalid_argument);
  req.size.reset();
  req.invariants = {Polynomial(pv("z", 9))};
  CHECK_THROWS_AS(synthesize(req), std::invalid_argument);
  req.invariants = {Polynomial(pv("x", 0))};
  req.count = 0;
  CHECK_THROWS_AS(synthesize(req), std::invalid_argument);
  req.count = 1;
  req.permutation = std::vector<Var>{pv("x", 0)};
  CHECK_THROWS_AS(search_cells(req), std::invalid_argument);
}

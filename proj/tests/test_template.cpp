#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loopsynth/template.hpp"
#include "support.hpp"

using namespace loopsynth;
using testsupport::pv;

namespace {

SymbolTable session_of(const std::vector<Var>& vars) {
  SymbolTable t;
  for (const auto& v : vars) t.add(v);
  return t;
}

Var sym(const RecurrenceTemplate& tpl, const std::string& name) {
  auto v = tpl.symbols.lookup(name);
  REQUIRE_MESSAGE(v.has_value(), name);
  return *v;
}

}  // namespace

TEST_CASE("int_partitions") {
  auto p3 = int_partitions(3);
  REQUIRE(p3.size() == 3);
  CHECK(p3[0].parts == std::vector<unsigned>{3});
  CHECK(p3[1].parts == std::vector<unsigned>{2, 1});
  CHECK(p3[2].parts == std::vector<unsigned>{1, 1, 1});
  const std::size_t counts[] = {1, 2, 3, 5, 7, 11, 15, 22};
  for (unsigned s = 1; s <= 8; ++s) CHECK(int_partitions(s).size() == counts[s - 1]);
  for (unsigned s = 1; s <= 12; ++s) {
    auto all = int_partitions(s);
    CHECK(all.front().parts == std::vector<unsigned>{s});
    for (std::size_t i = 0; i < all.size(); ++i) {
      REQUIRE(all[i].sum() == s);
      REQUIRE(std::is_sorted(all[i].parts.rbegin(), all[i].parts.rend()));
      if (i > 0) REQUIRE(std::lexicographical_compare(all[i].parts.begin(), all[i].parts.end(),
                                                      all[i - 1].parts.begin(), all[i - 1].parts.end()));
    }
  }
  CHECK_THROWS(int_partitions(0));
  CHECK(IntegerPartition::parse("1,2").parts == std::vector<unsigned>{2, 1});
  CHECK_THROWS(IntegerPartition::parse("2,x"));
  CHECK_THROWS(IntegerPartition::parse("0"));
}

TEST_CASE("general closed form of a size-2 system with one double root") {
  Var x = pv("x", 0), y = pv("y", 1);
  TemplateOptions opt;
  opt.partition = IntegerPartition{{2}};
  auto tpl = build_template(session_of({x, y}), {x, y}, opt);
  Var w = sym(tpl, "w_1");
  Var n = tpl.counter;
  Monomial wm(w);
  ExpPolynomial expect_x(wm, Polynomial(sym(tpl, "c_1_1_1")) + Polynomial(sym(tpl, "c_1_1_2")) * n);
  ExpPolynomial expect_y(wm, Polynomial(sym(tpl, "c_2_1_1")) + Polynomial(sym(tpl, "c_2_1_2")) * n);
  CHECK(tpl.closed_form[0].to_string() == expect_x.to_string());
  CHECK(tpl.closed_form[1].to_string() == expect_y.to_string());
  CHECK(tpl.b_unknowns().size() == 4);
  CHECK(tpl.a_unknowns().size() == 2);
  CHECK(tpl.coeff_symbols().size() == 4);
}

TEST_CASE("size-1 template") {
  Var x = pv("x", 0);
  TemplateOptions opt;
  opt.partition = IntegerPartition{{1}};
  auto tpl = build_template(session_of({x}), {x}, opt);
  CHECK(tpl.closed_form[0].to_string() ==
        ExpPolynomial(Monomial(sym(tpl, "w_1")), Polynomial(sym(tpl, "c_1_1_1"))).to_string());
}

TEST_CASE("parameter matrix construction") {
  Var x1 = pv("x1", 0), x2 = pv("x2", 1), x3 = pv("x3", 2);
  Var p1("p1", VarKind::Param, 3), p3("p3", VarKind::Param, 4);
  TemplateOptions opt;
  opt.partition = IntegerPartition{{3}};
  opt.params = ParamSpec{{p1, p3}, {0, 2}};
  auto tpl = build_template(session_of({x1, x2, x3, p1, p3}), {x1, x2, x3}, opt);
  REQUIRE(tpl.a.rows() == 3);
  REQUIRE(tpl.a.cols() == 3);
  CHECK(tpl.a.at(0, 0) == Polynomial(1));
  CHECK(tpl.a.at(0, 1).is_zero());
  CHECK(tpl.a.at(0, 2).is_zero());
  CHECK(tpl.a.at(1, 0) == Polynomial(sym(tpl, "a_2_1")));
  CHECK(tpl.a.at(1, 1) == Polynomial(sym(tpl, "a_2_2")));
  CHECK(tpl.a.at(1, 2) == Polynomial(sym(tpl, "a_2_3")));
  CHECK(tpl.a.at(2, 0).is_zero());
  CHECK(tpl.a.at(2, 1) == Polynomial(1));
  CHECK(tpl.a.at(2, 2).is_zero());
  CHECK(tpl.initial[0] == Polynomial(p1));
  CHECK(tpl.initial[2] == Polynomial(p3));
  // s * (r + 1) coefficient entries per (root, power) block
  CHECK(tpl.coeff_symbols().size() == 3 * 3 * 3);

  TemplateOptions bad = opt;
  bad.params = ParamSpec{{p1}, {5}};
  CHECK_THROWS_AS(build_template(session_of({x1, x2, x3, p1, p3}), {x1, x2, x3}, bad), std::invalid_argument);
}

TEST_CASE("shape tiers") {
  std::vector<Var> vars{pv("a", 0), pv("b", 1), pv("c", 2), pv("d", 3)};
  const std::size_t s = vars.size();
  TemplateOptions opt;
  opt.partition = IntegerPartition{{4}};
  opt.tier = ShapeTier::UnitUpperTriangular;
  auto un = build_template(session_of(vars), vars, opt);
  CHECK(un.b_unknowns().size() == s * (s - 1) / 2);
  CHECK(un.b.is_upper_triangular());
  for (std::size_t i = 0; i < s; ++i) CHECK(un.b.at(i, i) == Polynomial(1));
  opt.tier = ShapeTier::UpperTriangular;
  auto up = build_template(session_of(vars), vars, opt);
  CHECK(up.b_unknowns().size() == s * (s + 1) / 2);
  opt.tier = ShapeTier::Full;
  auto fu = build_template(session_of(vars), vars, opt);
  CHECK(fu.b_unknowns().size() == s * s);
  CHECK(fu.coeff_symbols().size() == s * s);
  opt.constant_rows = {3};
  opt.pinned_inits = {{3, Rational(1)}};
  auto aux = build_template(session_of(vars), vars, opt);
  CHECK(aux.b_unknowns().size() == s * (s - 1));
  CHECK(aux.initial[3] == Polynomial(1));
  CHECK(parse_tier("un") == ShapeTier::UnitUpperTriangular);
  CHECK_THROWS(parse_tier("xx"));
}

TEST_CASE("generated names avoid user names") {
  Var n = pv("n", 0), w = pv("w_1", 1);
  TemplateOptions opt;
  opt.partition = IntegerPartition{{2}};
  auto tpl = build_template(session_of({n, w}), {n, w}, opt);
  CHECK(tpl.counter.name != "n");
  CHECK(tpl.roots.roots[0].first.name != "w_1");
}

TEST_CASE("companion_embedding") {
  // x(n+4) - 4x(n+3) + 6x(n+2) - 4x(n+1) + x(n) = 0
  auto m = companion_embedding({1, -4, 6, -4, 1});
  REQUIRE(m.rows() == 4);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(m.at(i, j) == Polynomial(j == i + 1 ? 1 : 0));
  }
  CHECK(m.at(3, 0) == Polynomial(-1));
  CHECK(m.at(3, 1) == Polynomial(4));
  CHECK(m.at(3, 2) == Polynomial(-6));
  CHECK(m.at(3, 3) == Polynomial(4));
  // n^3 solves this recurrence; the embedding must reproduce it
  SymMatrix state = SymMatrix::column({Polynomial(0), Polynomial(1), Polynomial(8), Polynomial(27)});
  for (int n = 0; n < 10; ++n) {
    CHECK(state[0] == Polynomial(n * n * n));
    state = m * state;
  }

  auto one = companion_embedding({Rational(-3, 2), 1});
  CHECK(one.rows() == 1);
  CHECK(one.at(0, 0) == Polynomial(Rational(3, 2)));
  CHECK_THROWS(companion_embedding({0, 1, 1}));
  CHECK_THROWS(companion_embedding({1}));
}

TEST_CASE("companion embedding unrolling oracle") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t r = 1 + rep % 5;
    std::vector<Rational> c;
    for (std::size_t i = 0; i < r; ++i) c.push_back(testsupport::random_rational(rng));
    if (c[0] == 0) c[0] = 1;
    c.push_back(1);
    std::vector<Rational> seq;
    for (std::size_t i = 0; i < r; ++i) seq.push_back(testsupport::random_rational(rng));
    auto m = companion_embedding(c);
    std::vector<Polynomial> init(seq.begin(), seq.end());
    SymMatrix state = SymMatrix::column(init);
    for (std::size_t n = 0; n < 20; ++n) {
      Rational next = 0;
      for (std::size_t i = 0; i < r; ++i) next -= c[i] * seq[seq.size() - r + i];
      seq.push_back(next);
      REQUIRE(state[0] == Polynomial(seq[n]));
      state = m * state;
    }
  }
}

TEST_CASE("exponential polynomial arithmetic") {
  Var w("w", VarKind::Root), n("n", VarKind::Counter), x = pv("x", 0);
  ExpPolynomial e(Monomial(w), Polynomial(n) + 1);
  ExpPolynomial sq = e * e;
  REQUIRE(sq.terms().size() == 1);
  CHECK(sq.terms().begin()->first == Monomial(w, 2));
  CHECK(sq.at(2, n) == Polynomial(Monomial(w, 4), Rational(9)));
  auto sub = substitute_exp(Polynomial(x) * x - 1, {{x, e}});
  CHECK(sub.terms().size() == 2);
  CHECK((e + ExpPolynomial(Monomial(w), -(Polynomial(n) + 1))).is_zero());
}

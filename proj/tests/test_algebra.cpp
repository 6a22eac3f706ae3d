#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loopsynth/constraint.hpp"
#include "loopsynth/matrix.hpp"
#include "loopsynth/parse.hpp"
#include "loopsynth/polynomial.hpp"
#include "support.hpp"

using namespace loopsynth;
using testsupport::pv;

namespace {

Var entry(const std::string& name) { return Var(name, VarKind::MatrixEntry); }

Polynomial P(const std::string& text) { return parse_polynomial(text, free_resolver()); }

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-7/4") == Rational(-7, 4));
  CHECK(parse_rational("2.50") == Rational(5, 2));
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("x"));
  CHECK(to_string(Rational(-7, 4)) == "-7/4");
}

TEST_CASE("poly_arith") {
  Var x = pv("x", 0), y = pv("y", 1);
  CHECK((Polynomial(x) - Polynomial(y) * 2) + Polynomial(y) * 2 == Polynomial(x));
  CHECK((Polynomial(x) + y) * (Polynomial(x) - y) == Polynomial(x).pow(2) - Polynomial(y).pow(2));
  CHECK((Polynomial(x) - x).is_zero());
  CHECK(Polynomial(x).total_degree() == 1);
  CHECK(Polynomial().total_degree() == -1);
}

TEST_CASE("ring laws on random polynomials") {
  std::mt19937 rng(7);
  std::vector<Var> vars{pv("x", 0), pv("y", 1), pv("z", 2), Var("w", VarKind::Root)};
  for (int i = 0; i < 1000; ++i) {
    Polynomial p = testsupport::random_poly(rng, vars);
    Polynomial q = testsupport::random_poly(rng, vars);
    REQUIRE((p + q) - q == p);
  }
  for (int i = 0; i < 200; ++i) {
    Polynomial p = testsupport::random_poly(rng, vars, 3);
    Polynomial q = testsupport::random_poly(rng, vars, 3);
    Polynomial r = testsupport::random_poly(rng, vars, 3);
    REQUIRE(p * q == q * p);
    REQUIRE((p * q) * r == p * (q * r));
    REQUIRE(p * (q + r) == p * q + p * r);
    REQUIRE((p + q) + r == p + (q + r));
    if (!q.is_zero()) REQUIRE((p * q).divide_exact(q) == p);
  }
}

TEST_CASE("canonical printing and parsing") {
  CHECK(P("x^2 - 1/2 y + 3").to_string() == "x^2 - 1/2*y + 3");
  CHECK(P("3x(x - 1)") == P("3*x^2 - 3*x"));
  CHECK(P("a(b + 2c)") == P("a*b + 2*a*c"));
  CHECK(P("0.5 x") == P("1/2*x"));
  CHECK_THROWS_AS(P("x / y"), ParseError);
  CHECK_THROWS_AS(P("x ^ y"), ParseError);
  CHECK_THROWS_AS(P("(x + 1"), ParseError);
  auto conj = parse_conjunction("1 + 2a == c && 4b == (c - 1)^2", free_resolver());
  REQUIRE(conj.size() == 2);
  try {
    parse_polynomial("x + $", free_resolver(), 4);
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 5);
  }
}

TEST_CASE("substitute") {
  Var x = pv("x", 0), y = pv("y", 1), n = Var("n", VarKind::Counter);
  Polynomial p = Polynomial(x) - Polynomial(y) * 2;
  CHECK(p.substitute({{x, Polynomial(n) * 2 + 2}, {y, Polynomial(n) + 1}}).is_zero());
  CHECK(p.substitute({}) == p);
  // simultaneous, not sequential
  CHECK(Polynomial(x).substitute({{x, Polynomial(y)}, {y, Polynomial(x)}}) == Polynomial(y));
}

TEST_CASE("substitution composition oracle") {
  std::mt19937 rng(11);
  std::vector<Var> outer{pv("x", 0), pv("y", 1)};
  std::vector<Var> inner{pv("u", 2), pv("v", 3)};
  for (int i = 0; i < 200; ++i) {
    Polynomial p = testsupport::random_poly(rng, outer, 3, 2);
    std::map<Var, Polynomial> first{{outer[0], testsupport::random_poly(rng, inner, 2, 2)},
                                    {outer[1], testsupport::random_poly(rng, inner, 2, 2)}};
    std::map<Var, Rational> values{{inner[0], testsupport::random_rational(rng)},
                                   {inner[1], testsupport::random_rational(rng)}};
    Rational two_step = p.substitute(first).evaluate(values);
    std::map<Var, Rational> composed{{outer[0], first[outer[0]].evaluate(values)},
                                     {outer[1], first[outer[1]].evaluate(values)}};
    REQUIRE(two_step == p.evaluate(composed));
  }
}

TEST_CASE("coeffs_in") {
  Var z("z", VarKind::Aux), w("w_1", VarKind::Root);
  Var b11 = entry("b_1_1"), b12 = entry("b_1_2"), b21 = entry("b_2_1"), b22 = entry("b_2_2");
  Polynomial c0 = Polynomial(b12) * b21 - Polynomial(b11) * b22 + Polynomial(w).pow(2);
  Polynomial c1 = Polynomial(b11) + b22 - Polynomial(w) * 2;
  Polynomial p = c1 * z + c0;
  auto groups = p.coeffs_in(z);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == 0);
  CHECK(groups[0].second == c0);
  CHECK(groups[1].first == 1);
  CHECK(groups[1].second == c1);

  auto constant = Polynomial(5).coeffs_in(z);
  REQUIRE(constant.size() == 1);
  CHECK(constant[0].first == 0);
  CHECK(constant[0].second == Polynomial(5));
  CHECK(Polynomial().coeffs_in(z).empty());
}

TEST_CASE("coeffs_in reassembly oracle") {
  std::mt19937 rng(3);
  std::vector<Var> vars{pv("x", 0), pv("y", 1), Var("n", VarKind::Counter)};
  for (int i = 0; i < 300; ++i) {
    Polynomial p = testsupport::random_poly(rng, vars, 6, 4);
    for (const auto& v : vars) {
      auto groups = p.coeffs_in(v);
      for (std::size_t k = 0; k + 1 < groups.size(); ++k) REQUIRE(groups[k].first < groups[k + 1].first);
      for (const auto& [d, c] : groups) {
        REQUIRE(!c.contains(v));
        REQUIRE(!c.is_zero());
      }
      REQUIRE(reassemble(groups, v) == p);
    }
  }
}

TEST_CASE("char_poly") {
  Var w("w", VarKind::Root);
  Var b11 = entry("b_1_1"), b12 = entry("b_1_2"), b21 = entry("b_2_1"), b22 = entry("b_2_2");
  SymMatrix b(2, 2, {Polynomial(b11), Polynomial(b12), Polynomial(b21), Polynomial(b22)});
  Polynomial expected = Polynomial(w).pow(2) - Polynomial(b11) * w - Polynomial(b22) * w -
                        Polynomial(b12) * b21 + Polynomial(b11) * b22;
  CHECK(char_poly(b, w) == expected);

  SymMatrix one(1, 1, {Polynomial(entry("b"))});
  CHECK(char_poly(one, w) == Polynomial(w) - Polynomial(entry("b")));

  CHECK_THROWS(char_poly(SymMatrix(2, 3), w));
  CHECK_THROWS(determinant(SymMatrix(2, 3)));
}

TEST_CASE("determinant against Leibniz expansion") {
  std::mt19937 rng(5);
  Var w("w", VarKind::Root);
  for (std::size_t s = 1; s <= 4; ++s) {
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<Polynomial> entries;
      for (std::size_t i = 0; i < s * s; ++i) {
        // sparse numeric matrices exercise pivoting
        entries.emplace_back(rep % 3 == 0 && i % 2 == 0 ? Rational(0) : testsupport::random_rational(rng));
      }
      SymMatrix m(s, s, entries);
      REQUIRE(determinant(m) == testsupport::leibniz_det(m));
      Polynomial chi = char_poly(m, w);
      REQUIRE(chi.degree_in(w) == s);
      REQUIRE(chi.coeffs_in(w).back().second == Polynomial(1));
      REQUIRE(chi == testsupport::leibniz_det(SymMatrix::identity(s).scaled(Polynomial(w)) - m));
    }
  }
  // symbolic 3x3
  std::vector<Polynomial> sym;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) sym.emplace_back(entry("b_" + std::to_string(i) + "_" + std::to_string(j)));
  }
  SymMatrix m(3, 3, sym);
  CHECK(determinant(m) == testsupport::leibniz_det(m));
  CHECK(char_poly(m, w) == testsupport::leibniz_det(SymMatrix::identity(3).scaled(Polynomial(w)) - m));
}

TEST_CASE("matrix bounds") {
  SymMatrix m(2, 2);
  CHECK_THROWS_AS(m.at(2, 0), std::out_of_range);
  CHECK_THROWS_AS(m.at(0, 2), std::out_of_range);
  CHECK(SymMatrix::identity(2) * SymMatrix::identity(2) == SymMatrix::identity(2));
}

TEST_CASE("decompose") {
  Var x = pv("x", 0), y = pv("y", 1), z = pv("z", 2);
  Polynomial px(x), py(y), pz(z);
  std::vector<Clause> in{
      Clause::eq(py * pz * px.pow(3) + py.pow(3) * px.pow(2) + (pz.pow(2) - 3) * px),
      Clause({Atom(px - 1, Rel::Eq), Atom(py - 1, Rel::Eq), Atom(pz - 1, Rel::Eq)}),
      Clause::ne(pz - py),
  };
  auto out = decompose(in, {x});
  std::vector<Clause> expected{
      Clause::eq(py * pz),
      Clause::eq(py.pow(3)),
      Clause::eq(pz.pow(2) - 3),
      in[1],
      in[2],
  };
  REQUIRE(out.size() == expected.size());
  for (const auto& e : expected) {
    CHECK(std::any_of(out.begin(), out.end(), [&](const Clause& c) { return same_constraint(c, e); }));
  }
  auto free_of = decompose({Clause::eq(py - 2)}, {x});
  REQUIRE(free_of.size() == 1);
  CHECK(same_constraint(free_of[0], Clause::eq(py - 2)));
}

TEST_CASE("decompose evaluation oracle") {
  std::mt19937 rng(17);
  Var x = pv("x", 0), y = pv("y", 1), a = Var("a", VarKind::Coeff), b = Var("b", VarKind::Coeff);
  std::vector<Var> all{x, y, a, b};
  int vanishing = 0;
  for (int i = 0; i < 150; ++i) {
    Polynomial p = testsupport::random_poly(rng, all, 4, 3);
    std::map<Var, Rational> rest{{a, testsupport::random_rational(rng)}, {b, testsupport::random_rational(rng)}};
    if (i % 3 == 0) {
      // force a root of every coefficient in the remaining symbols
      p *= Polynomial(a) - rest[a];
    }
    auto coeffs = decompose_polynomial(p, {x, y});
    for (const auto& c : coeffs) {
      REQUIRE(!c.contains(x));
      REQUIRE(!c.contains(y));
    }
    bool all_zero = std::all_of(coeffs.begin(), coeffs.end(), [&](const Polynomial& c) { return c.evaluate(rest) == 0; });
    Polynomial partial = p.substitute({{a, Polynomial(rest[a])}, {b, Polynomial(rest[b])}});
    bool vanishes_everywhere = true;
    for (int k = 0; k < 50; ++k) {
      std::map<Var, Rational> point{{x, testsupport::random_rational(rng, -9, 9, 7)},
                                    {y, testsupport::random_rational(rng, -9, 9, 7)}};
      if (partial.evaluate(point) != 0) vanishes_everywhere = false;
    }
    REQUIRE(all_zero == vanishes_everywhere);
    vanishing += all_zero ? 1 : 0;
  }
  CHECK(vanishing >= 40);
}

TEST_CASE("atom normalization") {
  Var x = pv("x", 0), y = pv("y", 1);
  Atom a(Polynomial(x) * Rational(-1, 2) + Polynomial(y) * Rational(3, 4), Rel::Eq);
  CHECK(a.lhs == Polynomial(x) * 2 - Polynomial(y) * 3);
  Atom lt(Polynomial(x) * -2 + 4, Rel::Lt);
  CHECK(lt.lhs == Polynomial(x) * -1 + 2);
  CHECK(lt.holds({{x, Rational(3)}}));
  CHECK(!lt.holds({{x, Rational(1)}}));
  CHECK(Atom(Polynomial(0), Rel::Eq).holds_constant());
  CHECK(!Atom(Polynomial(1), Rel::Eq).holds_constant());
}

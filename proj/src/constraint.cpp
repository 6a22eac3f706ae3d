#include "loopsynth/constraint.hpp"

#include <algorithm>
#include <stdexcept>

namespace loopsynth {

const char* to_string(Rel rel) {
  switch (rel) {
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Gt: return ">";
    case Rel::Ge: return ">=";
  }
  return "?";
}

const char* to_string(ClauseGroup group) {
  switch (group) {
    case ClauseGroup::Roots: return "roots";
    case ClauseGroup::Coeff: return "coeff";
    case ClauseGroup::Init: return "init";
    case ClauseGroup::Alg: return "alg";
    case ClauseGroup::NonTrivial: return "nontrivial";
    case ClauseGroup::Partition: return "partition";
    case ClauseGroup::Block: return "block";
    case ClauseGroup::User: return "user";
  }
  return "?";
}

Polynomial primitive_part(const Polynomial& p) {
  if (p.is_zero()) return p;
  Integer num_gcd = 0;
  Integer den_lcm = 1;
  for (const auto& [m, c] : p.terms()) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
  }
  Rational scale(den_lcm, num_gcd);
  scale.canonicalize();
  if (p.leading_term().second < 0) scale = -scale;
  return p * scale;
}

namespace {

Polynomial positive_primitive(const Polynomial& p) {
  Polynomial q = primitive_part(p);
  // primitive_part may flip the sign; undo that for order relations.
  if (!p.is_zero() && (q.leading_term().second > 0) != (p.leading_term().second > 0)) return -q;
  return q;
}

bool compare(const Rational& v, Rel rel) {
  switch (rel) {
    case Rel::Eq: return v == 0;
    case Rel::Ne: return v != 0;
    case Rel::Lt: return v < 0;
    case Rel::Le: return v <= 0;
    case Rel::Gt: return v > 0;
    case Rel::Ge: return v >= 0;
  }
  return false;
}

}  // namespace

Atom::Atom(Polynomial p, Rel r) : rel(r) {
  lhs = (r == Rel::Eq || r == Rel::Ne) ? primitive_part(p) : positive_primitive(p);
}

bool Atom::holds(const std::map<Var, Rational>& values) const { return compare(lhs.evaluate(values), rel); }

bool Atom::holds_constant() const {
  if (!lhs.is_constant()) throw std::logic_error("atom is not constant");
  return compare(lhs.constant_term(), rel);
}

std::string Atom::to_string() const { return lhs.to_string() + " " + loopsynth::to_string(rel) + " 0"; }

Clause::Clause(std::vector<Atom> atoms, ClauseGroup g, bool is_soft)
    : disjuncts(std::move(atoms)), soft(is_soft), group(g) {
  if (disjuncts.empty()) throw std::invalid_argument("clause needs at least one disjunct");
}

Clause Clause::eq(Polynomial p, ClauseGroup g) { return Clause({Atom(std::move(p), Rel::Eq)}, g); }

Clause Clause::ne(Polynomial p, ClauseGroup g) { return Clause({Atom(std::move(p), Rel::Ne)}, g); }

bool Clause::holds(const std::map<Var, Rational>& values) const {
  return std::any_of(disjuncts.begin(), disjuncts.end(), [&](const Atom& a) { return a.holds(values); });
}

std::set<Var> Clause::variables() const {
  std::set<Var> out;
  for (const auto& a : disjuncts) {
    auto vs = a.lhs.variables();
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

std::string Clause::to_string() const {
  std::string out;
  for (const auto& a : disjuncts) {
    if (!out.empty()) out += " | ";
    out += a.to_string();
  }
  return out;
}

std::vector<Polynomial> decompose_polynomial(const Polynomial& p, const std::vector<Var>& vars) {
  if (vars.empty()) return {p};
  const Var& last = vars.back();
  std::vector<Var> rest(vars.begin(), vars.end() - 1);
  std::vector<Polynomial> out;
  for (auto& [degree, coeff] : p.coeffs_in(last)) {
    auto sub = decompose_polynomial(coeff, rest);
    out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
  }
  return out;
}

std::vector<Clause> decompose(const std::vector<Clause>& clauses, const std::vector<Var>& vars) {
  std::vector<Clause> out;
  auto push_unique = [&](Clause c) {
    for (const auto& existing : out) {
      if (same_constraint(existing, c)) return;
    }
    out.push_back(std::move(c));
  };
  for (const auto& clause : clauses) {
    if (!clause.is_unit_equality() || vars.empty()) {
      push_unique(clause);
      continue;
    }
    for (auto& q : decompose_polynomial(clause.disjuncts.front().lhs, vars)) {
      Clause c = Clause::eq(std::move(q), clause.group);
      c.soft = clause.soft;
      push_unique(std::move(c));
    }
  }
  return out;
}

}  // namespace loopsynth

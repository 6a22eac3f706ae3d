#include "loopsynth/polynomial.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace loopsynth {

const char* to_string(VarKind kind) {
  switch (kind) {
    case VarKind::Program: return "program";
    case VarKind::Initial: return "initial";
    case VarKind::Param: return "param";
    case VarKind::Root: return "root";
    case VarKind::MatrixEntry: return "matrix-entry";
    case VarKind::InitEntry: return "init-entry";
    case VarKind::Coeff: return "coeff";
    case VarKind::Counter: return "counter";
    case VarKind::Aux: return "aux";
  }
  return "?";
}

Var::Var(std::string n, VarKind k, int r) : name(std::move(n)), kind(k), rank(is_user_kind(k) ? r : 0) {}

std::strong_ordering operator<=>(const Var& a, const Var& b) {
  if (a.generated() != b.generated()) return a.generated() ? std::strong_ordering::greater : std::strong_ordering::less;
  if (a.rank != b.rank) return a.rank <=> b.rank;
  return a.name.compare(b.name) <=> 0;
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(const Var& v, unsigned exponent) {
  if (exponent > 0) factors_.emplace_back(v, exponent);
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
  Monomial m;
  for (auto& [v, e] : factors) {
    if (e == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().first == v) {
      m.factors_.back().second += e;
    } else {
      m.factors_.emplace_back(std::move(v), e);
    }
  }
  return m;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

unsigned Monomial::degree_in(const Var& v) const {
  for (const auto& [w, e] : factors_) {
    if (w == v) return e;
  }
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() && b != other.factors_.end()) {
    if (a->first < b->first) {
      out.factors_.push_back(*a++);
    } else if (b->first < a->first) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  out.factors_.insert(out.factors_.end(), a, factors_.end());
  out.factors_.insert(out.factors_.end(), b, other.factors_.end());
  return out;
}

Monomial Monomial::pow(unsigned e) const {
  if (e == 0) return {};
  Monomial out = *this;
  for (auto& f : out.factors_) f.second *= e;
  return out;
}

bool Monomial::divisible_by(const Monomial& other) const {
  auto a = factors_.begin();
  for (const auto& [v, e] : other.factors_) {
    while (a != factors_.end() && a->first < v) ++a;
    if (a == factors_.end() || !(a->first == v) || a->second < e) return false;
  }
  return true;
}

Monomial Monomial::operator/(const Monomial& other) const {
  Monomial out;
  auto b = other.factors_.begin();
  for (const auto& [v, e] : factors_) {
    unsigned sub = 0;
    if (b != other.factors_.end() && b->first == v) {
      sub = b->second;
      ++b;
    }
    if (e > sub) out.factors_.emplace_back(v, e - sub);
  }
  return out;
}

std::pair<unsigned, Monomial> Monomial::split(const Var& v) const {
  Monomial rest;
  unsigned exponent = 0;
  for (const auto& f : factors_) {
    if (f.first == v) {
      exponent = f.second;
    } else {
      rest.factors_.push_back(f);
    }
  }
  return {exponent, std::move(rest)};
}

std::string Monomial::to_string() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (const auto& [v, e] : factors_) {
    if (!out.empty()) out += '*';
    out += v.name;
    if (e > 1) out += '^' + std::to_string(e);
  }
  return out;
}

bool grlex_greater(const Monomial& a, const Monomial& b) {
  unsigned da = a.degree();
  unsigned db = b.degree();
  if (da != db) return da > db;
  // Lex: the first variable (in global order) whose exponents differ decides.
  auto ia = a.factors().begin();
  auto ib = b.factors().begin();
  while (ia != a.factors().end() && ib != b.factors().end()) {
    if (ia->first == ib->first) {
      if (ia->second != ib->second) return ia->second > ib->second;
      ++ia;
      ++ib;
    } else {
      // The smaller variable is present in one monomial only.
      return ia->first < ib->first;
    }
  }
  return ia != a.factors().end() && ib == b.factors().end();
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Polynomial::Polynomial(const Var& v) { terms_.emplace(Monomial(v), Rational(1)); }

Polynomial::Polynomial(const Monomial& m, const Rational& c) {
  if (c != 0) terms_.emplace(m, c);
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Polynomial::constant_term() const { return coefficient(Monomial{}); }

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::set<Var> Polynomial::variables() const {
  std::set<Var> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& f : m.factors()) out.insert(f.first);
  }
  return out;
}

bool Polynomial::contains(const Var& v) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first.contains(v); });
}

unsigned Polynomial::degree_in(const Var& v) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in(v));
  return d;
}

int Polynomial::total_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.degree()));
  return d;
}

unsigned Polynomial::degree_in(const std::set<Var>& vars) const {
  unsigned best = 0;
  for (const auto& [m, c] : terms_) {
    unsigned d = 0;
    for (const auto& [v, e] : m.factors()) {
      if (vars.count(v) != 0) d += e;
    }
    best = std::max(best, d);
  }
  return best;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) { return *this = *this * other; }

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& [m, coeff] : terms_) coeff *= c;
  }
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result(Rational(1));
  Polynomial base = *this;
  while (e > 0) {
    if ((e & 1U) != 0) result *= base;
    e >>= 1U;
    if (e > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::divide_exact(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw std::domain_error("division by the zero polynomial");
  const auto& [lead_m, lead_c] = divisor.leading_term();
  Polynomial remainder = *this;
  Polynomial quotient;
  while (!remainder.is_zero()) {
    const auto& [rm, rc] = remainder.leading_term();
    if (!rm.divisible_by(lead_m)) throw std::domain_error("inexact polynomial division");
    Polynomial step(rm / lead_m, rc / lead_c);
    quotient += step;
    remainder -= step * divisor;
  }
  return quotient;
}

Polynomial Polynomial::substitute(const std::map<Var, Polynomial>& bindings) const {
  if (bindings.empty()) return *this;
  Polynomial out;
  // Powers of bound variables are reused across terms.
  std::map<std::pair<Var, unsigned>, Polynomial> powers;
  auto power_of = [&](const Var& v, unsigned e, const Polynomial& value) -> const Polynomial& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it == powers.end()) it = powers.emplace(key, value.pow(e)).first;
    return it->second;
  };
  for (const auto& [m, c] : terms_) {
    Polynomial term{c};
    std::vector<Monomial::Factor> kept;
    for (const auto& [v, e] : m.factors()) {
      auto b = bindings.find(v);
      if (b == bindings.end()) {
        kept.emplace_back(v, e);
      } else {
        term *= power_of(v, e, b->second);
      }
    }
    if (!kept.empty()) term *= Polynomial(Monomial::from_factors(std::move(kept)), Rational(1));
    out += term;
  }
  return out;
}

Rational Polynomial::evaluate(const std::map<Var, Rational>& values) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, e] : m.factors()) {
      auto it = values.find(v);
      if (it == values.end()) throw std::out_of_range("unbound variable " + v.name);
      t *= loopsynth::pow(it->second, e);
    }
    total += t;
  }
  return total;
}

std::vector<std::pair<unsigned, Polynomial>> Polynomial::coeffs_in(const Var& v) const {
  std::map<unsigned, Polynomial> grouped;
  for (const auto& [m, c] : terms_) {
    auto [e, rest] = m.split(v);
    grouped[e].add_term(rest, c);
  }
  std::vector<std::pair<unsigned, Polynomial>> out;
  for (auto& [e, p] : grouped) {
    if (!p.is_zero()) out.emplace_back(e, std::move(p));
  }
  return out;
}

Polynomial Polynomial::sign_normalized() const {
  if (!is_zero() && leading_term().second < 0) return -*this;
  return *this;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (m.is_one()) {
      os << mag.get_str();
    } else if (mag == 1) {
      os << m.to_string();
    } else {
      os << mag.get_str() << '*' << m.to_string();
    }
  }
  return os.str();
}

bool poly_less(const Polynomial& a, const Polynomial& b) {
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
    if (!(ia->first == ib->first)) return grlex_greater(ia->first, ib->first);
    if (ia->second != ib->second) return ia->second < ib->second;
  }
  return ia == a.terms().end() && ib != b.terms().end();
}

Polynomial reassemble(const std::vector<std::pair<unsigned, Polynomial>>& coeffs, const Var& v) {
  Polynomial out;
  for (const auto& [e, c] : coeffs) out += c * Polynomial(Monomial(v, e), Rational(1));
  return out;
}

}  // namespace loopsynth

#pragma once

#include "loopsynth/matrix.hpp"
#include "loopsynth/polynomial.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace testsupport {

using loopsynth::Monomial;
using loopsynth::Polynomial;
using loopsynth::Rational;
using loopsynth::SymMatrix;
using loopsynth::Var;
using loopsynth::VarKind;

inline Var pv(const std::string& name, int rank) { return Var(name, VarKind::Program, rank); }

inline Rational random_rational(std::mt19937& rng, int lo = -3, int hi = 3, int max_den = 4) {
  std::uniform_int_distribution<int> num(lo * max_den, hi * max_den);
  std::uniform_int_distribution<int> den(1, max_den);
  int d = den(rng);
  int n = std::clamp(num(rng), lo * d, hi * d);
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline Polynomial random_poly(std::mt19937& rng, const std::vector<Var>& vars, int terms = 4, unsigned max_deg = 3) {
  std::uniform_int_distribution<unsigned> deg(0, max_deg);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  Polynomial p;
  for (int t = 0; t < terms; ++t) {
    std::vector<Monomial::Factor> factors;
    unsigned d = deg(rng);
    for (unsigned k = 0; k < d; ++k) factors.emplace_back(vars[pick(rng)], 1);
    p += Polynomial(Monomial::from_factors(factors), random_rational(rng));
  }
  return p;
}

/// Determinant by full permutation expansion.
inline Polynomial leibniz_det(const SymMatrix& m) {
  std::vector<std::size_t> perm(m.rows());
  std::iota(perm.begin(), perm.end(), 0);
  Polynomial total;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j] ? 1 : 0;
    }
    Polynomial term(inversions % 2 == 0 ? 1 : -1);
    for (std::size_t i = 0; i < perm.size(); ++i) term *= m.at(i, perm[i]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace testsupport

namespace testsupport {

using RMatrix = std::vector<std::vector<Rational>>;

/// Gauss-Jordan inverse; returns false when singular.
inline bool invert(RMatrix m, RMatrix& inv) {
  const std::size_t n = m.size();
  inv.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return false;
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Rational d = m[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return true;
}

inline RMatrix mul(const RMatrix& a, const RMatrix& b) {
  RMatrix out(a.size(), std::vector<Rational>(b[0].size(), Rational(0)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

inline SymMatrix to_sym(const RMatrix& m) {
  SymMatrix out(m.size(), m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[0].size(); ++j) out.at(i, j) = Polynomial(m[i][j]);
  }
  return out;
}

/// One nonzero vector of the right kernel, if any.
inline std::optional<std::vector<Rational>> kernel_vector(RMatrix m, std::size_t cols) {
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[row]);
    Rational d = m[row][col];
    for (auto& x : m[row]) x /= d;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rational f = m[r][col];
      for (std::size_t j = 0; j < cols; ++j) m[r][j] -= f * m[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::size_t free_col = cols;
  for (std::size_t c = 0; c < cols; ++c) {
    if (std::find(pivot_col.begin(), pivot_col.end(), c) == pivot_col.end()) {
      free_col = c;
      break;
    }
  }
  if (free_col == cols) return std::nullopt;
  std::vector<Rational> v(cols, Rational(0));
  v[free_col] = 1;
  for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -m[r][free_col];
  return v;
}

struct RandomSystem {
  RMatrix update;
  std::vector<Rational> init;
};

/// kind 0: arbitrary entries; 1: unit upper triangular; 2: P diag(1, l, l^2) P^-1.
inline RandomSystem random_system(std::mt19937& rng, std::size_t s, int kind) {
  RandomSystem sys;
  sys.update.assign(s, std::vector<Rational>(s, Rational(0)));
  for (std::size_t i = 0; i < s; ++i) sys.init.push_back(random_rational(rng));
  if (kind == 0) {
    for (auto& row : sys.update) {
      for (auto& x : row) x = random_rational(rng);
    }
  } else if (kind == 1) {
    for (std::size_t i = 0; i < s; ++i) {
      sys.update[i][i] = 1;
      for (std::size_t j = i + 1; j < s; ++j) sys.update[i][j] = random_rational(rng);
    }
  } else {
    RMatrix p(s, std::vector<Rational>(s)), pinv;
    do {
      for (auto& row : p) {
        for (auto& x : row) x = random_rational(rng, -2, 2, 1);
      }
    } while (!invert(p, pinv));
    std::vector<Rational> l{Rational(1), Rational(2), Rational(4)};
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 1) l = {Rational(1), Rational(-1, 2), Rational(1, 4)};
    RMatrix d(s, std::vector<Rational>(s, Rational(0)));
    for (std::size_t i = 0; i < s; ++i) d[i][i] = l[i];
    sys.update = mul(mul(p, d), pinv);
  }
  return sys;
}

/// All monomials of degree <= d over vars, constant first.
inline std::vector<Monomial> monomials_upto(const std::vector<Var>& vars, unsigned d) {
  std::vector<Monomial> out{Monomial{}};
  std::vector<Monomial> layer{Monomial{}};
  for (unsigned k = 0; k < d; ++k) {
    std::vector<Monomial> next;
    for (const auto& m : layer) {
      for (const auto& v : vars) {
        Monomial n = m * Monomial(v);
        if (std::find(next.begin(), next.end(), n) == next.end()) next.push_back(n);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = next;
  }
  return out;
}

/// Values of the states X_0..X_{steps-1} by plain rational iteration.
inline std::vector<std::vector<Rational>> unroll(const RandomSystem& sys, std::size_t steps) {
  std::vector<std::vector<Rational>> out;
  std::vector<Rational> x = sys.init;
  for (std::size_t n = 0; n < steps; ++n) {
    out.push_back(x);
    std::vector<Rational> y(x.size(), Rational(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) y[i] += sys.update[i][j] * x[j];
    }
    x = y;
  }
  return out;
}

inline std::map<Var, Rational> state_map(const std::vector<Var>& vars, const std::vector<Rational>& x) {
  std::map<Var, Rational> out;
  for (std::size_t i = 0; i < vars.size(); ++i) out.emplace(vars[i], x[i]);
  return out;
}

/// A polynomial of degree <= 2 vanishing on the first `fit` states, or a
/// random one when no such polynomial exists.
inline Polynomial candidate(std::mt19937& rng, const RandomSystem& sys, const std::vector<Var>& vars, std::size_t fit) {
  auto monos = monomials_upto(vars, 2);
  RMatrix rows;
  for (const auto& x : unroll(sys, fit)) {
    auto values = state_map(vars, x);
    std::vector<Rational> row;
    for (const auto& m : monos) row.push_back(Polynomial(m, Rational(1)).evaluate(values));
    rows.push_back(row);
  }
  if (auto k = kernel_vector(rows, monos.size())) {
    Polynomial p;
    for (std::size_t i = 0; i < monos.size(); ++i) p += Polynomial(monos[i], (*k)[i]);
    return p;
  }
  return random_poly(rng, vars, 3, 2);
}

}  // namespace testsupport

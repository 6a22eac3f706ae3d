#include "loopsynth/matrix.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace loopsynth {

SymMatrix::SymMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

SymMatrix::SymMatrix(std::size_t rows, std::size_t cols, std::vector<Polynomial> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) throw std::invalid_argument("matrix entry count does not match shape");
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Polynomial(1);
  return m;
}

SymMatrix SymMatrix::column(std::vector<Polynomial> entries) {
  std::size_t n = entries.size();
  return SymMatrix(n, 1, std::move(entries));
}

const Polynomial& SymMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
  return entries_[r * cols_ + c];
}

Polynomial& SymMatrix::at(std::size_t r, std::size_t c) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
  return entries_[r * cols_ + c];
}

SymMatrix SymMatrix::operator*(const SymMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("matrix product dimension mismatch");
  SymMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Polynomial& a = at(i, k);
      if (a.is_zero()) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) {
        const Polynomial& b = other.at(k, j);
        if (!b.is_zero()) out.at(i, j) += a * b;
      }
    }
  }
  return out;
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix sum dimension mismatch");
  SymMatrix out = *this;
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += other.entries_[i];
  return out;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix difference dimension mismatch");
  SymMatrix out = *this;
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] -= other.entries_[i];
  return out;
}

SymMatrix SymMatrix::scaled(const Polynomial& factor) const {
  SymMatrix out = *this;
  for (auto& e : out.entries_) e = e * factor;
  return out;
}

SymMatrix SymMatrix::substitute(const std::map<Var, Polynomial>& bindings) const {
  SymMatrix out = *this;
  for (auto& e : out.entries_) e = e.substitute(bindings);
  return out;
}

SymMatrix SymMatrix::col(std::size_t c) const {
  SymMatrix out(rows_, 1);
  for (std::size_t i = 0; i < rows_; ++i) out.at(i, 0) = at(i, c);
  return out;
}

bool SymMatrix::is_upper_triangular() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < i && j < cols_; ++j) {
      if (!at(i, j).is_zero()) return false;
    }
  }
  return true;
}

bool SymMatrix::is_lower_triangular() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < cols_; ++j) {
      if (!at(i, j).is_zero()) return false;
    }
  }
  return true;
}

bool SymMatrix::all_constant() const {
  for (const auto& e : entries_) {
    if (!e.is_constant()) return false;
  }
  return true;
}

std::string SymMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i > 0) os << "; ";
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j > 0) os << ", ";
      os << at(i, j).to_string();
    }
  }
  os << ']';
  return os.str();
}

Polynomial determinant(const SymMatrix& m) {
  if (!m.square()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return Polynomial(1);
  std::vector<std::vector<Polynomial>> a(n, std::vector<Polynomial>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m.at(i, j);
  }
  bool negate = false;
  Polynomial prev(1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k].is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a[swap_row][k].is_zero()) ++swap_row;
      if (swap_row == n) return Polynomial();
      std::swap(a[k], a[swap_row]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        // Sylvester's identity guarantees exact division by the previous pivot.
        Polynomial num = a[k][k] * a[i][j] - a[i][k] * a[k][j];
        a[i][j] = num.divide_exact(prev);
      }
      a[i][k] = Polynomial();
    }
    prev = a[k][k];
  }
  Polynomial det = a[n - 1][n - 1];
  return negate ? -det : det;
}

Polynomial char_poly(const SymMatrix& b, const Var& z) {
  if (!b.square()) throw std::invalid_argument("characteristic polynomial of a non-square matrix");
  if (b.rows() == 0) throw std::invalid_argument("characteristic polynomial of an empty matrix");
  SymMatrix shifted = SymMatrix::identity(b.rows()).scaled(Polynomial(z)) - b;
  return determinant(shifted);
}

}  // namespace loopsynth

#pragma once

#include "loopsynth/polynomial.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace loopsynth {

/// Dense rectangular matrix of polynomials, row-major. Entry access is
/// bounds-checked and throws std::out_of_range.
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(std::size_t rows, std::size_t cols);
  SymMatrix(std::size_t rows, std::size_t cols, std::vector<Polynomial> entries);

  static SymMatrix identity(std::size_t n);
  /// n x 1 column.
  static SymMatrix column(std::vector<Polynomial> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  const Polynomial& at(std::size_t r, std::size_t c) const;
  Polynomial& at(std::size_t r, std::size_t c);
  /// Column vector entry.
  const Polynomial& operator[](std::size_t r) const { return at(r, 0); }

  SymMatrix operator*(const SymMatrix& other) const;
  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix operator-(const SymMatrix& other) const;
  SymMatrix scaled(const Polynomial& factor) const;
  SymMatrix substitute(const std::map<Var, Polynomial>& bindings) const;
  SymMatrix col(std::size_t c) const;

  bool is_upper_triangular() const;
  bool is_lower_triangular() const;
  bool all_constant() const;

  const std::vector<Polynomial>& entries() const { return entries_; }
  std::string to_string() const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Polynomial> entries_;
};

/// Determinant by fraction-free (Bareiss) elimination over the polynomial ring.
/// Throws std::invalid_argument for non-square input.
Polynomial determinant(const SymMatrix& m);

/// det(z*I - B) as a polynomial in `z`. Throws for non-square or empty B.
Polynomial char_poly(const SymMatrix& b, const Var& z);

}  // namespace loopsynth

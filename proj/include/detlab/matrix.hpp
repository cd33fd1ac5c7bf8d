#pragma once

// Exact dense matrices: determinant, adjugate, rank and the bordered
// (Schur complement) determinant formula.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "detlab/scalar.hpp"

namespace detlab {

class Matrix {
 public:
  /// Zero matrix.
  Matrix(std::size_t rows, std::size_t cols, FieldSpec field = {});

  static Matrix identity(std::size_t n, FieldSpec field = {});
  /// Row-major entries; throws if entries.size() != rows * cols.
  static Matrix from_entries(std::size_t rows, std::size_t cols,
                             std::vector<Scalar> entries, FieldSpec field = {});
  static Matrix from_ints(std::initializer_list<std::initializer_list<long>> rows,
                          FieldSpec field = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  const FieldSpec& field() const { return field_; }
  std::span<const Scalar> entries() const { return entries_; }
  std::span<const Scalar> row(std::size_t i) const {
    return std::span<const Scalar>(entries_).subspan(i * cols_, cols_);
  }

  const Scalar& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }
  Scalar& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  FieldSpec field_;
  std::vector<Scalar> entries_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, const Scalar& c);
Matrix transpose(const Matrix& m);
/// The (n-1)x(n-1) matrix left after deleting `row` and `col`.
Matrix minor_matrix(const Matrix& m, std::size_t row, std::size_t col);

/// Fraction-free (Bareiss) elimination over Z after clearing row
/// denominators; ordinary Gaussian elimination over F_p.
Scalar det(const Matrix& m);

/// Laplace expansion along the first row. Exponential; kept as an
/// independent reference for small n.
Scalar det_cofactor(const Matrix& m);

/// Transposed matrix of signed cofactors. M * adjugate(M) = det(M) * I.
Matrix adjugate(const Matrix& m);

/// Exact rank via elimination with full pivoting (first nonzero entry of
/// the remaining block in row-major order).
std::size_t rank(const Matrix& m);

/// Builds [[Y, y^t], [z, x]].
Matrix assemble_bordered(const Matrix& y_block, std::span<const Scalar> y,
                         std::span<const Scalar> z, const Scalar& x);

/// x * det(Y) - z * adjugate(Y) * y^t. Polynomial in the entries, so it
/// equals det(assemble_bordered(Y, y, z, x)) with no invertibility needed.
Scalar schur_value(const Matrix& y_block, std::span<const Scalar> y,
                   std::span<const Scalar> z, const Scalar& x);

}  // namespace detlab

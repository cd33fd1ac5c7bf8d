#include "detlab/matrix.hpp"

#include <utility>

#include "detlab/error.hpp"

namespace detlab {
namespace {

using IntRows = std::vector<std::vector<mpz_class>>;

// Multiplies each row by the lcm of its denominators. Returns the integer
// rows and the product of the multipliers.
IntRows clear_denominators(const Matrix& m, mpz_class& scale_out) {
  IntRows rows(m.rows(), std::vector<mpz_class>(m.cols()));
  scale_out = 1;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).denominator().get_mpz_t());
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      rows[i][j] = m(i, j).numerator() * (l / m(i, j).denominator());
    }
    scale_out *= l;
  }
  return rows;
}

// Bareiss elimination in place on an n x n integer matrix.
mpz_class bareiss_det(IntRows& a) {
  const std::size_t n = a.size();
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(a[k][k]) == 0) {
      std::size_t p = k + 1;
      while (p < n && sgn(a[p][k]) == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a[k][k];
  }
  return sign > 0 ? a[n - 1][n - 1] : mpz_class(-a[n - 1][n - 1]);
}

Scalar gauss_det(Matrix a) {
  const FieldSpec& f = a.field();
  const std::size_t n = a.rows();
  Scalar result = f.one();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k).is_zero()) ++p;
    if (p == n) return f.zero();
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      result = f.neg(result);
    }
    result = f.mul(result, a(k, k));
    const Scalar pivot_inv = f.inv(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k).is_zero()) continue;
      const Scalar factor = f.mul(a(i, k), pivot_inv);
      for (std::size_t j = k; j < n; ++j) {
        a(i, j) = f.sub(a(i, j), f.mul(factor, a(k, j)));
      }
    }
  }
  return result;
}

void require_square(const Matrix& m, const char* op) {
  if (!m.is_square() || m.rows() == 0) {
    fail(std::string(op) + ": matrix must be square and nonempty");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, FieldSpec field)
    : rows_(rows), cols_(cols), field_(field), entries_(rows * cols) {}

Matrix Matrix::identity(std::size_t n, FieldSpec field) {
  Matrix m(n, n, field);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
  return m;
}

Matrix Matrix::from_entries(std::size_t rows, std::size_t cols,
                            std::vector<Scalar> entries, FieldSpec field) {
  if (entries.size() != rows * cols) fail("matrix entry count mismatch");
  for (const Scalar& s : entries) {
    if (!field.contains(s)) fail("matrix entry outside " + field.name());
  }
  Matrix m(rows, cols, field);
  m.entries_ = std::move(entries);
  return m;
}

Matrix Matrix::from_ints(std::initializer_list<std::initializer_list<long>> rows,
                         FieldSpec field) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<Scalar> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) fail("ragged matrix literal");
    for (long v : row) entries.push_back(field.from_int(v));
  }
  return from_entries(r, c, std::move(entries), field);
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) fail("multiply: dimension mismatch");
  const FieldSpec& f = a.field();
  Matrix out(a.rows(), b.cols(), f);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Scalar acc;
      for (std::size_t k = 0; k < a.cols(); ++k) f.add_mul(acc, a(i, k), b(k, j));
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix scale(const Matrix& m, const Scalar& c) {
  Matrix out(m.rows(), m.cols(), m.field());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m.field().mul(c, m(i, j));
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows(), m.field());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  }
  return out;
}

Matrix minor_matrix(const Matrix& m, std::size_t row, std::size_t col) {
  Matrix out(m.rows() - 1, m.cols() - 1, m.field());
  for (std::size_t i = 0, oi = 0; i < m.rows(); ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, oj = 0; j < m.cols(); ++j) {
      if (j == col) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

Scalar det(const Matrix& m) {
  require_square(m, "det");
  const FieldSpec& f = m.field();
  if (f.is_prime_field()) return gauss_det(m);
  mpz_class denom_scale;
  IntRows a = clear_denominators(m, denom_scale);
  return f.from_rational(mpq_class(bareiss_det(a), denom_scale));
}

Scalar det_cofactor(const Matrix& m) {
  require_square(m, "det_cofactor");
  const FieldSpec& f = m.field();
  if (m.rows() == 1) return m(0, 0);
  Scalar acc;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (m(0, j).is_zero()) continue;
    const Scalar term = f.mul(m(0, j), det_cofactor(minor_matrix(m, 0, j)));
    acc = (j % 2 == 0) ? f.add(acc, term) : f.sub(acc, term);
  }
  return acc;
}

Matrix adjugate(const Matrix& m) {
  require_square(m, "adjugate");
  const FieldSpec& f = m.field();
  const std::size_t n = m.rows();
  if (n == 1) return Matrix::identity(1, f);
  Matrix out(n, n, f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Scalar c = det(minor_matrix(m, i, j));
      out(j, i) = ((i + j) % 2 == 0) ? c : f.neg(c);
    }
  }
  return out;
}

std::size_t rank(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const FieldSpec& f = m.field();
  if (f.is_prime_field()) {
    Matrix a = m;
    std::vector<std::size_t> col_of(cols);
    std::size_t r = 0;
    for (; r < rows && r < cols; ++r) {
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = r; i < rows && pi == rows; ++i) {
        for (std::size_t j = r; j < cols; ++j) {
          if (!a(i, j).is_zero()) {
            pi = i;
            pj = j;
            break;
          }
        }
      }
      if (pi == rows) break;
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(pi, j));
      for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, r), a(i, pj));
      const Scalar pivot_inv = f.inv(a(r, r));
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (a(i, r).is_zero()) continue;
        const Scalar factor = f.mul(a(i, r), pivot_inv);
        for (std::size_t j = r; j < cols; ++j) {
          a(i, j) = f.sub(a(i, j), f.mul(factor, a(r, j)));
        }
      }
    }
    return r;
  }

  mpz_class ignored;
  IntRows a = clear_denominators(m, ignored);
  mpz_class prev = 1;
  std::size_t r = 0;
  for (; r < rows && r < cols; ++r) {
    std::size_t pi = rows, pj = cols;
    for (std::size_t i = r; i < rows && pi == rows; ++i) {
      for (std::size_t j = r; j < cols; ++j) {
        if (sgn(a[i][j]) != 0) {
          pi = i;
          pj = j;
          break;
        }
      }
    }
    if (pi == rows) break;
    std::swap(a[r], a[pi]);
    for (std::size_t i = 0; i < rows; ++i) std::swap(a[i][r], a[i][pj]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = r + 1; j < cols; ++j) {
        mpz_class t = a[i][j] * a[r][r] - a[i][r] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][r] = 0;
    }
    prev = a[r][r];
  }
  return r;
}

Matrix assemble_bordered(const Matrix& y_block, std::span<const Scalar> y,
                         std::span<const Scalar> z, const Scalar& x) {
  const std::size_t k = y_block.rows();
  if (!y_block.is_square() || k == 0 || y.size() != k || z.size() != k) {
    fail("bordered matrix: dimension mismatch");
  }
  Matrix out(k + 1, k + 1, y_block.field());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out(i, j) = y_block(i, j);
    out(i, k) = y[i];
    out(k, i) = z[i];
  }
  out(k, k) = x;
  return out;
}

Scalar schur_value(const Matrix& y_block, std::span<const Scalar> y,
                   std::span<const Scalar> z, const Scalar& x) {
  const std::size_t k = y_block.rows();
  if (!y_block.is_square() || k == 0 || y.size() != k || z.size() != k) {
    fail("schur_value: dimension mismatch");
  }
  const FieldSpec& f = y_block.field();
  const Matrix adj = adjugate(y_block);
  Scalar quad;
  for (std::size_t i = 0; i < k; ++i) {
    Scalar row_dot;
    for (std::size_t j = 0; j < k; ++j) f.add_mul(row_dot, adj(i, j), y[j]);
    f.add_mul(quad, z[i], row_dot);
  }
  return f.sub(f.mul(x, det(y_block)), quad);
}

}  // namespace detlab

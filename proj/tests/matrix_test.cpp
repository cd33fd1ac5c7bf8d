#include <doctest.h>

#include <random>

#include "detlab/error.hpp"
#include "detlab/matrix.hpp"
#include "test_util.hpp"

using namespace detlab;
using detlab::testing::q;
using detlab::testing::rand_matrix;

TEST_CASE("det closed forms") {
  CHECK(det(Matrix::from_ints({{1, 0}, {0, 1}})) == q("1"));
  CHECK(det(Matrix::from_ints({{1, 2}, {3, 4}})) == q("-2"));
  CHECK(det(Matrix::from_ints({{1, 2}, {2, 4}})) == q("0"));
  CHECK(det(Matrix::from_ints({{0, 1}, {1, 0}})) == q("-1"));
  CHECK(det(Matrix::from_ints({{7}})) == q("7"));
  CHECK_THROWS_AS(det(Matrix::from_ints({{1, 2}})), Error);
}

TEST_CASE("det with rational entries") {
  const FieldSpec f;
  const Matrix m = Matrix::from_entries(
      2, 2, {q("1/2"), q("1/3"), q("1/4"), q("1/5")}, f);
  CHECK(det(m) == q("1/60"));
}

TEST_CASE("det over F_p") {
  const FieldSpec f = FieldSpec::prime_field(5);
  CHECK(det(Matrix::from_ints({{1, 2}, {3, 4}}, f)) == f.from_int(3));
  CHECK(det(Matrix::from_ints({{2, 1}, {4, 2}}, f)).is_zero());
}

TEST_CASE("adjugate") {
  CHECK(adjugate(Matrix::from_ints({{1, 2}, {3, 4}})) ==
        Matrix::from_ints({{4, -2}, {-3, 1}}));
  CHECK(adjugate(Matrix::identity(3)) == Matrix::identity(3));
  CHECK(adjugate(Matrix::from_ints({{2}})) == Matrix::from_ints({{1}}));
}

TEST_CASE("rank") {
  CHECK(rank(Matrix(3, 3)) == 0);
  CHECK(rank(Matrix::identity(4)) == 4);
  CHECK(rank(Matrix::from_ints({{1, 2, 3}, {2, 4, 6}})) == 1);
  CHECK(rank(Matrix::from_ints({{0, 0, 1}, {0, 1, 0}})) == 2);
  CHECK(rank(Matrix::from_ints({{1, 2}, {2, 4}, {3, 7}})) == 2);
  const FieldSpec f = FieldSpec::prime_field(3);
  CHECK(rank(Matrix::from_ints({{1, 2}, {2, 1}}, f)) == 1);
}

TEST_CASE("schur_value examples") {
  const FieldSpec f;
  const std::vector<Scalar> zeros = {f.zero(), f.zero()};
  CHECK(schur_value(Matrix::identity(2), zeros, zeros, q("5")) == q("5"));
  CHECK(det(assemble_bordered(Matrix::identity(2), zeros, zeros, q("5"))) == q("5"));
  CHECK(schur_value(Matrix::from_ints({{1, 2}, {3, 4}}), zeros, zeros, q("1")) == q("-2"));
  CHECK_THROWS_AS(schur_value(Matrix::identity(2), std::vector<Scalar>{f.zero()},
                              zeros, q("1")),
                  Error);
}

TEST_CASE("property: Bareiss det agrees with cofactor expansion") {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int t = 0; t < 150; ++t) {
      const Matrix m = rand_matrix(rng, n, n, 6, t % 2 == 0 ? 1 : 4);
      CHECK(det(m) == det_cofactor(m));
    }
  }
  const FieldSpec f = FieldSpec::prime_field(11);
  std::uniform_int_distribution<long> entry(0, 10);
  for (int t = 0; t < 100; ++t) {
    Matrix m(3, 3, f);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m(i, j) = f.from_int(entry(rng));
    CHECK(det(m) == det_cofactor(m));
  }
}

TEST_CASE("property: adjugate identity") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 5;
    const Matrix m = rand_matrix(rng, n, n, 3, t % 3 == 0 ? 3 : 1);
    CHECK(multiply(m, adjugate(m)) == scale(Matrix::identity(n), det(m)));
  }
}

TEST_CASE("property: det is alternating") {
  std::mt19937_64 rng(13);
  const FieldSpec f;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 4;
    Matrix m = rand_matrix(rng, n, n, 5, 2);
    const Scalar before = det(m);
    const std::size_t a = t % n;
    const std::size_t b = (a + 1 + t % (n - 1)) % n;
    for (std::size_t j = 0; j < n; ++j) std::swap(m(a, j), m(b, j));
    CHECK(det(m) == f.neg(before));
  }
}

TEST_CASE("property: full rank iff nonzero det") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 4;
    const Matrix m = rand_matrix(rng, n, n, 1, 1);  // entries in {-1,0,1}
    CHECK((rank(m) == n) == !det(m).is_zero());
  }
}

TEST_CASE("property: rank of a product of factors") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 100; ++t) {
    const std::size_t r = 1 + t % 3;
    const Matrix left = rand_matrix(rng, 4, r, 5);
    const Matrix right = rand_matrix(rng, r, 5, 5);
    const std::size_t got = rank(multiply(left, right));
    CHECK(got <= std::min(rank(left), rank(right)));
    CHECK(got == rank(transpose(multiply(left, right))));
  }
}

TEST_CASE("property: schur value equals bordered determinant") {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 2 + t % 3;
    const Matrix y_block = rand_matrix(rng, k, k, 4, 2);
    const Matrix border = rand_matrix(rng, 2, k, 4, 2);
    const Scalar x = detlab::testing::rand_rational(rng, 4, 2);
    CHECK(schur_value(y_block, border.row(0), border.row(1), x) ==
          det(assemble_bordered(y_block, border.row(0), border.row(1), x)));
  }
}

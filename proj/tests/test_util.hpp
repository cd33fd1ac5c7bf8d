#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "detlab/matrix.hpp"
#include "detlab/scalar.hpp"

namespace detlab::testing {

inline GroundSet ints(std::initializer_list<long> values, FieldSpec f = {}) {
  std::vector<Scalar> v;
  for (long x : values) v.push_back(f.from_int(x));
  return make_ground_set(v, f);
}

inline Scalar q(const std::string& text, FieldSpec f = {}) {
  return parse_scalar(text, f);
}

inline Scalar rand_rational(std::mt19937_64& rng, long span, long max_den) {
  std::uniform_int_distribution<long> num(-span, span);
  std::uniform_int_distribution<long> den(1, max_den);
  return FieldSpec::rationals().from_rational(mpq_class(num(rng), den(rng)));
}

inline Scalar rand_nonzero(std::mt19937_64& rng, long span, long max_den) {
  for (;;) {
    Scalar s = rand_rational(rng, span, max_den);
    if (!s.is_zero()) return s;
  }
}

inline GroundSet rand_set(std::mt19937_64& rng, std::size_t size, long span) {
  std::vector<Scalar> v;
  const FieldSpec f;
  while (true) {
    v.push_back(rand_rational(rng, span, 3));
    GroundSet s = make_ground_set(v, f);
    if (s.size() == size) return s;
  }
}

inline Matrix rand_matrix(std::mt19937_64& rng, std::size_t rows,
                          std::size_t cols, long span, long max_den = 1) {
  std::vector<Scalar> e;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    e.push_back(rand_rational(rng, span, max_den));
  }
  return Matrix::from_entries(rows, cols, std::move(e));
}

}  // namespace detlab::testing

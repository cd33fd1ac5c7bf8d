#include <doctest.h>

#include <random>

#include "detlab/energy.hpp"
#include "detlab/error.hpp"
#include "detlab/families.hpp"
#include "test_util.hpp"

using namespace detlab;
using detlab::testing::ints;
using detlab::testing::q;

namespace {

// Calls fn(values) for every tuple in set^len.
template <typename Fn>
void tuples(const GroundSet& set, std::size_t len, Fn&& fn) {
  std::vector<std::size_t> idx(len, 0);
  std::vector<Scalar> v(len, set[0]);
  for (;;) {
    fn(v);
    std::size_t i = len;
    while (i-- > 0) {
      if (++idx[i] < set.size()) {
        v[i] = set[idx[i]];
        break;
      }
      idx[i] = 0;
      v[i] = set[0];
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

std::uint64_t brute_T(const GroundSet& u) {
  const FieldSpec& f = u.field();
  std::uint64_t n = 0;
  tuples(u, 8, [&](const std::vector<Scalar>& t) {
    if (f.add(f.mul(t[0], t[1]), f.mul(t[2], t[3])) ==
        f.add(f.mul(t[4], t[5]), f.mul(t[6], t[7])))
      ++n;
  });
  return n;
}

std::uint64_t brute_N(const GroundSet& u) {
  const FieldSpec& f = u.field();
  std::uint64_t n = 0;
  tuples(u, 6, [&](const std::vector<Scalar>& t) {
    if (f.mul(t[0], f.sub(t[1], t[2])) == f.mul(t[3], f.sub(t[4], t[5]))) ++n;
  });
  return n;
}

std::uint64_t brute_S(const GroundSet& u) {
  const FieldSpec& f = u.field();
  std::uint64_t n = 0;
  tuples(u, 8, [&](const std::vector<Scalar>& t) {
    if (f.sub(f.mul(t[0], t[1]), f.mul(t[2], t[3])) ==
        f.sub(f.mul(t[4], t[5]), f.mul(t[6], t[7])))
      ++n;
  });
  return n;
}

std::uint64_t brute_bilinear(const Matrix& m, const GroundSet& b, const GroundSet& c,
                             const Scalar& omega) {
  const FieldSpec& f = m.field();
  const std::size_t k = m.rows();
  std::uint64_t n = 0;
  tuples(b, k, [&](const std::vector<Scalar>& bv) {
    tuples(c, k, [&](const std::vector<Scalar>& cv) {
      Scalar s;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) s = f.add(s, f.mul(f.mul(m(i, j), bv[j]), cv[i]));
      if (s == omega) ++n;
    });
  });
  return n;
}

std::map<Scalar, BigCount> dist(std::initializer_list<std::pair<long, long>> kv) {
  std::map<Scalar, BigCount> out;
  for (auto [k, v] : kv) out.emplace(FieldSpec().from_int(k), BigCount(v));
  return out;
}

}  // namespace

TEST_CASE("product distribution") {
  CHECK(product_distribution(ints({0, 1})).counts == dist({{0, 3}, {1, 1}}));
  CHECK(product_distribution(ints({1, 2})).counts == dist({{1, 1}, {2, 2}, {4, 1}}));
  CHECK(product_distribution(ints({1})).counts == dist({{1, 1}}));
  CHECK(product_distribution(ints({1, 2, 3})).mass() == 9);
}

TEST_CASE("R distribution") {
  CHECK(r_distribution(ints({0, 1})).counts == dist({{0, 9}, {1, 6}, {2, 1}}));
  CHECK(r_distribution(ints({1})).counts == dist({{2, 1}}));
  const ValueDistribution r = r_distribution(ints({1, 2}));
  CHECK(r.at(q("2")) == 1);
  CHECK(r.at(q("8")) == 1);
  CHECK(r.counts.begin()->first == q("2"));
  CHECK(r.counts.rbegin()->first == q("8"));
  CHECK(r.mass() == 16);
}

TEST_CASE("Q and Q2 distributions") {
  CHECK(q_distribution(ints({1, 2})).counts ==
        dist({{-2, 1}, {-1, 1}, {0, 4}, {1, 1}, {2, 1}}));
  CHECK(q2_distribution(ints({0, 1})).counts == dist({{-1, 3}, {0, 10}, {1, 3}}));
  CHECK(q_distribution(ints({-1, 3, 4})).mass() == 27);
  CHECK(q2_distribution(ints({-1, 3, 4})).mass() == 81);
}

TEST_CASE("energy examples") {
  CHECK(energy_T(ints({1})) == 1);
  CHECK(energy_T(ints({0, 1})) == 118);
  CHECK(energy_T(ints({1, 2})) == brute_T(ints({1, 2})));
  CHECK(energy_N(ints({1})) == 1);
  CHECK(energy_N(ints({1, 2})) == 20);
  CHECK(energy_N(ints({0, 1})) == brute_N(ints({0, 1})));
  CHECK(energy_S(ints({1})) == 1);
  CHECK(energy_S(ints({0, 1})) == 118);
  CHECK(energy_S(ints({0, 1})) == brute_S(ints({0, 1})));
  CHECK(energy_S(ints({1, 2})) == brute_S(ints({1, 2})));
}

TEST_CASE("property: energies match brute force") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const GroundSet u = detlab::testing::rand_set(rng, 1 + t % 3, 5);
    CHECK(energy_T(u) == brute_T(u));
    CHECK(energy_S(u) == brute_S(u));
  }
  for (int t = 0; t < 12; ++t) {
    const GroundSet u = detlab::testing::rand_set(rng, 1 + t % 4, 6);
    CHECK(energy_N(u) == brute_N(u));
  }
  const FieldSpec p = FieldSpec::prime_field(5);
  const GroundSet u = ints({0, 2, 3}, p);
  CHECK(energy_T(u) == brute_T(u));
  CHECK(energy_N(u) == brute_N(u));
}

TEST_CASE("property: N and T are dilation invariant") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 15; ++t) {
    const GroundSet u = detlab::testing::rand_set(rng, 2 + t % 4, 8);
    const GroundSet v = scale_set(u, detlab::testing::rand_nonzero(rng, 5, 4));
    CHECK(energy_N(v) == energy_N(u));
    CHECK(energy_T(v) == energy_T(u));
  }
}

TEST_CASE("count_bilinear examples") {
  const Matrix id = Matrix::identity(2);
  CHECK(count_bilinear(id, ints({1, 2}), ints({1, 2}), q("2")) == 1);
  CHECK(count_bilinear(id, ints({1, 2}), ints({1, 2}), q("4")) == 4);
  CHECK(count_bilinear(id, ints({1}), ints({1}), q("2")) == 1);
  CHECK_THROWS_AS(count_bilinear(id, ints({1}), ints({1}), q("0")), Error);
  CHECK_THROWS_AS(count_bilinear(Matrix::from_ints({{1, 2}, {2, 4}}), ints({1}),
                                 ints({1}), q("1")),
                  Error);
}

TEST_CASE("property: count_bilinear matches brute pair enumeration") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 20; ++t) {
    const std::size_t k = 2 + t % 2;
    Matrix m = detlab::testing::rand_matrix(rng, k, k, 3);
    if (det(m).is_zero()) continue;
    const GroundSet b = detlab::testing::rand_set(rng, 1 + t % 3, 4);
    const GroundSet c = detlab::testing::rand_set(rng, 1 + (t + 1) % 3, 4);
    for (const char* w : {"1", "-2", "3/2", "5"}) {
      CHECK(count_bilinear(m, b, c, q(w)) == brute_bilinear(m, b, c, q(w)));
    }
  }
}

TEST_CASE("E* engines agree") {
  CHECK(energy_Estar_mu(ints({1})) == 1);
  CHECK(energy_Estar_brute(ints({1})) == 1);
  CHECK(energy_Estar_mu(ints({1, 2})) == energy_Estar_brute(ints({1, 2})));
  CHECK(energy_Estar_mu(ints({0, 1})) == energy_Estar_brute(ints({0, 1})));
  EngineOptions tight;
  tight.budget = 1000;
  CHECK_THROWS_AS(energy_Estar_brute(ints({1, 2}), tight), Error);
}

TEST_CASE("dyadic pyramid") {
  const DyadicPyramid one = dyadic_pyramid(ints({1}));
  REQUIRE(one.classes.size() == 1);
  CHECK(one.classes[0].w == 1);
  CHECK(one.classes[0].triples == 1);

  for (const GroundSet& x : {ints({1, 2}), ints({0, 1}), ints({-1, 2, 5})}) {
    const DyadicPyramid p = dyadic_pyramid(x);
    BigCount x6;
    mpz_ui_pow_ui(x6.get_mpz_t(), x.size(), 6);
    CHECK(p.total_mass() == x6);
    const BigCount estar = energy_Estar_mu(x);
    for (const DyadicClass& c : p.classes) CHECK(c.weighted <= estar);
    CHECK(p.max_weighted <= estar);
  }
}

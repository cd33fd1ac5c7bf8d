#pragma once

// Additive-energy counts built from value-distribution tables: each energy
// is a sum of squared multiplicities of some bilinear expression.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "detlab/matrix.hpp"
#include "detlab/parallel.hpp"
#include "detlab/scalar.hpp"

namespace detlab {

/// t -> number of enumerated tuples whose expression evaluates to t.
struct ValueDistribution {
  std::string label;
  std::map<Scalar, BigCount> counts;

  BigCount at(const Scalar& t) const;
  BigCount mass() const;
  BigCount sum_of_squares() const;
};

/// P(t) = #{(u, v) in U^2 : uv = t}.
ValueDistribution product_distribution(const GroundSet& u);
/// R(t) = #{(u1, u2, v1, v2) in U^4 : u1 v1 + u2 v2 = t}, as P (+) P.
ValueDistribution r_distribution(const GroundSet& u);
/// Q(t) = #{(v, u, w) in U^3 : v (u - w) = t}.
ValueDistribution q_distribution(const GroundSet& u);
/// Q2(t) = #{(u1, u3, v1, v3) in U^4 : u1 v3 - u3 v1 = t}, as P (-) P.
ValueDistribution q2_distribution(const GroundSet& u);

/// Solutions of v1 u1 + v2 u2 = x1 y1 + x2 y2 over U^8: sum_t R(t)^2.
BigCount energy_T(const GroundSet& u);
/// Solutions of v1 (u1 - w1) = v2 (u2 - w2) over U^6: sum_t Q(t)^2.
BigCount energy_N(const GroundSet& u);
/// Solutions of u1 v3 - u3 v1 = y1 z3 - y3 z1 over U^8: sum_t Q2(t)^2.
BigCount energy_S(const GroundSet& u);

/// #{(b, c) in B^k x C^k : <M b, c> = omega} for nonsingular M and
/// omega != 0. Each distinct v = M b is solved for its last nonzero
/// coordinate of c.
BigCount count_bilinear(const Matrix& m, const GroundSet& b, const GroundSet& c,
                        const Scalar& omega, const EngineOptions& opts = {});

/// Pairs of 2 x 3 row blocks over X with equal 2 x 2 minor triples, as the
/// sum of squared minor multiplicities (zero triple included).
BigCount energy_Estar_mu(const GroundSet& x, const EngineOptions& opts = {});
/// Same count by enumerating all 12-tuples and testing the three minor
/// equations directly.
BigCount energy_Estar_brute(const GroundSet& x, const EngineOptions& opts = {});

struct DyadicClass {
  std::uint64_t w = 0;           // class holds triples with w <= mu < 2w
  std::uint64_t triples = 0;     // number of distinct minor triples
  BigCount mass;                 // sum of mu over the class
  BigCount weighted;             // w^2 * triples
};

struct DyadicPyramid {
  std::vector<DyadicClass> classes;  // ascending w, empty classes omitted
  BigCount max_weighted;             // max over classes of w^2 * triples
  BigCount total_mass() const;
};

/// Dyadic classes of the n = 3 minor multiplicities.
DyadicPyramid dyadic_pyramid(const GroundSet& x, const EngineOptions& opts = {});

}  // namespace detlab

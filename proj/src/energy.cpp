#include "detlab/energy.hpp"

#include <algorithm>
#include <unordered_map>

#include "detlab/detcount.hpp"
#include "detlab/error.hpp"

namespace detlab {
namespace {

using Tally = std::unordered_map<Scalar, BigCount, ScalarHash>;
using VectorTally =
    std::unordered_map<std::vector<Scalar>, std::uint64_t, ScalarVectorHash>;

ValueDistribution finish(std::string label, const Tally& tally) {
  ValueDistribution out;
  out.label = std::move(label);
  out.counts.insert(tally.begin(), tally.end());
  return out;
}

// a (op) b over pairs of keys, with multiplicities multiplied.
ValueDistribution combine(std::string label, const ValueDistribution& a,
                          const ValueDistribution& b, const FieldSpec& f,
                          bool subtract) {
  Tally tally;
  for (const auto& [s, cs] : a.counts) {
    for (const auto& [t, ct] : b.counts) {
      tally[subtract ? f.sub(s, t) : f.add(s, t)] += cs * ct;
    }
  }
  return finish(std::move(label), tally);
}

void check_budget(std::uint64_t cost, const EngineOptions& opts, const char* what) {
  if (cost > opts.budget) {
    fail_budget(std::string(what) + ": estimated cost " + std::to_string(cost) +
                " exceeds budget " + std::to_string(opts.budget));
  }
}

}  // namespace

BigCount ValueDistribution::at(const Scalar& t) const {
  const auto it = counts.find(t);
  return it == counts.end() ? BigCount(0) : it->second;
}

BigCount ValueDistribution::mass() const {
  BigCount total = 0;
  for (const auto& [t, c] : counts) total += c;
  return total;
}

BigCount ValueDistribution::sum_of_squares() const {
  BigCount total = 0;
  for (const auto& [t, c] : counts) total += c * c;
  return total;
}

ValueDistribution product_distribution(const GroundSet& u) {
  const FieldSpec& f = u.field();
  Tally tally;
  for (const Scalar& a : u.elements()) {
    for (const Scalar& b : u.elements()) tally[f.mul(a, b)] += 1;
  }
  return finish("uv", tally);
}

ValueDistribution r_distribution(const GroundSet& u) {
  const ValueDistribution p = product_distribution(u);
  return combine("u1v1+u2v2", p, p, u.field(), false);
}

ValueDistribution q_distribution(const GroundSet& u) {
  const FieldSpec& f = u.field();
  Tally differences;
  for (const Scalar& a : u.elements()) {
    for (const Scalar& b : u.elements()) differences[f.sub(a, b)] += 1;
  }
  Tally tally;
  for (const Scalar& v : u.elements()) {
    for (const auto& [delta, count] : differences) tally[f.mul(v, delta)] += count;
  }
  return finish("v(u-w)", tally);
}

ValueDistribution q2_distribution(const GroundSet& u) {
  const ValueDistribution p = product_distribution(u);
  return combine("u1v3-u3v1", p, p, u.field(), true);
}

BigCount energy_T(const GroundSet& u) { return r_distribution(u).sum_of_squares(); }
BigCount energy_N(const GroundSet& u) { return q_distribution(u).sum_of_squares(); }
BigCount energy_S(const GroundSet& u) { return q2_distribution(u).sum_of_squares(); }

BigCount count_bilinear(const Matrix& m, const GroundSet& b, const GroundSet& c,
                        const Scalar& omega, const EngineOptions& opts) {
  const std::size_t k = m.rows();
  if (!m.is_square() || k == 0) fail("bilinear: matrix must be square");
  if (!(m.field() == b.field()) || !(b.field() == c.field())) {
    fail("bilinear: matrix and sets must share a field");
  }
  if (omega.is_zero()) fail("bilinear: omega must be nonzero");
  if (det(m).is_zero()) fail("bilinear: matrix must be nonsingular");
  const FieldSpec& f = m.field();
  const std::uint64_t vectors = saturating_pow(b.size(), k);
  const std::uint64_t prefixes = saturating_pow(c.size(), k - 1);
  check_budget(vectors, opts, "bilinear");
  check_budget(vectors > opts.budget / std::max<std::uint64_t>(prefixes, 1)
                   ? opts.budget + 1
                   : vectors * prefixes,
               opts, "bilinear");

  // Multiplicity of each image v = M b.
  VectorTally images;
  IndexOdometer bo(b.size(), k, 0);
  std::vector<Scalar> v(k);
  for (std::uint64_t i = 0; i < vectors; ++i, bo.next()) {
    for (std::size_t r = 0; r < k; ++r) {
      Scalar acc;
      for (std::size_t j = 0; j < k; ++j) f.add_mul(acc, m(r, j), b[bo.digits()[j]]);
      v[r] = acc;
    }
    ++images[v];
  }
  std::vector<std::pair<std::vector<Scalar>, std::uint64_t>> entries(images.begin(),
                                                                     images.end());
  std::sort(entries.begin(), entries.end());

  std::vector<BigCount> partial(resolve_threads(opts.threads));
  parallel_ranges(entries.size(), opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    std::uint64_t acc = 0;
                    for (std::uint64_t e = begin; e < end; ++e) {
                      const auto& [image, mult] = entries[e];
                      std::size_t pivot = k;
                      while (pivot > 0 && image[pivot - 1].is_zero()) --pivot;
                      if (pivot == 0) continue;  // <0, c> = 0 != omega
                      --pivot;
                      const Scalar pivot_inv = f.inv(image[pivot]);
                      std::uint64_t hits = 0;
                      IndexOdometer co(c.size(), k - 1, 0);
                      for (std::uint64_t p = 0; p < prefixes; ++p, co.next()) {
                        Scalar partial_sum;
                        for (std::size_t j = 0, d = 0; j < k; ++j) {
                          if (j == pivot) continue;
                          f.add_mul(partial_sum, image[j], c[co.digits()[d++]]);
                        }
                        if (c.contains(f.mul(f.sub(omega, partial_sum), pivot_inv))) ++hits;
                      }
                      acc += hits * mult;
                    }
                    partial[w] = BigCount(static_cast<unsigned long>(acc));
                  });
  BigCount total = 0;
  for (const BigCount& p : partial) total += p;
  return total;
}

BigCount energy_Estar_mu(const GroundSet& x, const EngineOptions& opts) {
  const MinorMultiplicityMap minors = minor_multiplicities(x, 3, opts);
  BigCount total = BigCount(static_cast<unsigned long>(minors.zero_count)) *
                   BigCount(static_cast<unsigned long>(minors.zero_count));
  for (const auto& [key, mu] : minors.entries) {
    const BigCount m(static_cast<unsigned long>(mu));
    total += m * m;
  }
  return total;
}

BigCount energy_Estar_brute(const GroundSet& x, const EngineOptions& opts) {
  const std::uint64_t total = saturating_pow(x.size(), 12);
  check_budget(total, opts, "E* brute");
  const FieldSpec& f = x.field();
  std::vector<std::uint64_t> partial(resolve_threads(opts.threads), 0);
  parallel_ranges(
      total, opts.threads, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        if (begin >= end) return;
        IndexOdometer odo(x.size(), 12, begin);
        std::uint64_t hits = 0;
        // Layout: u1 u2 u3 v1 v2 v3 y1 y2 y3 z1 z2 z3.
        const auto at = [&](std::size_t i) -> const Scalar& { return x[odo.digits()[i]]; };
        const auto minor = [&](std::size_t r0, std::size_t r1, std::size_t a,
                               std::size_t b) {
          return f.sub(f.mul(at(r0 + a), at(r1 + b)), f.mul(at(r0 + b), at(r1 + a)));
        };
        for (std::uint64_t i = begin; i < end; ++i, odo.next()) {
          if (minor(0, 3, 0, 2) != minor(6, 9, 0, 2)) continue;  // u1v3-u3v1
          if (minor(0, 3, 1, 2) != minor(6, 9, 1, 2)) continue;  // u2v3-u3v2
          if (minor(0, 3, 0, 1) != minor(6, 9, 0, 1)) continue;  // u1v2-u2v1
          ++hits;
        }
        partial[w] = hits;
      });
  BigCount sum = 0;
  for (std::uint64_t p : partial) sum += BigCount(static_cast<unsigned long>(p));
  return sum;
}

BigCount DyadicPyramid::total_mass() const {
  BigCount total = 0;
  for (const DyadicClass& c : classes) total += c.mass;
  return total;
}

DyadicPyramid dyadic_pyramid(const GroundSet& x, const EngineOptions& opts) {
  const MinorMultiplicityMap minors = minor_multiplicities(x, 3, opts);
  std::map<std::uint64_t, DyadicClass> classes;
  const auto add = [&](std::uint64_t mu) {
    std::uint64_t w = 1;
    while (w * 2 <= mu) w *= 2;
    DyadicClass& c = classes[w];
    c.w = w;
    ++c.triples;
    c.mass += BigCount(static_cast<unsigned long>(mu));
  };
  if (minors.zero_count != 0) add(minors.zero_count);
  for (const auto& [key, mu] : minors.entries) add(mu);

  DyadicPyramid out;
  for (auto& [w, c] : classes) {
    const BigCount wb(static_cast<unsigned long>(w));
    c.weighted = wb * wb * BigCount(static_cast<unsigned long>(c.triples));
    if (c.weighted > out.max_weighted) out.max_weighted = c.weighted;
    out.classes.push_back(c);
  }
  return out;
}

}  // namespace detlab

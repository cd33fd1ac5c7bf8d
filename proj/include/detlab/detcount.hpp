#pragma once

// Counting engines for the number of n x n matrices over a ground set with
// a prescribed determinant, the full determinant spectrum, rank counts and
// the bordered-block decomposition of the det-d solution set.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detlab/parallel.hpp"
#include "detlab/scalar.hpp"

namespace detlab {

/// Map d -> D_n(X, d) with keys in ascending field order.
struct SpectrumHistogram {
  std::size_t n = 0;
  std::size_t set_size = 0;
  FieldSpec field;
  std::map<Scalar, BigCount> counts;

  /// Zero for determinants never attained.
  BigCount at(const Scalar& d) const;
  BigCount total_mass() const;
  std::size_t distinct() const { return counts.size(); }
};

/// Multiplicities of the signed first-row cofactor vector over all choices
/// of the bottom (n-1) x n block. The zero vector is held separately.
struct MinorMultiplicityMap {
  std::size_t n = 0;
  /// Sorted lexicographically by key.
  std::vector<std::pair<std::vector<Scalar>, std::uint64_t>> entries;
  std::uint64_t zero_count = 0;

  std::uint64_t total_mass() const;
};

/// Estimated elementary steps for each engine, used for budget checks.
std::uint64_t brute_cost(std::size_t set_size, std::size_t n);
std::uint64_t rowblock_cost(std::size_t set_size, std::size_t n);

/// Enumerates every matrix in X^{n x n}. The reference oracle.
BigCount count_det_brute(const GroundSet& set, std::size_t n, const Scalar& d,
                         const EngineOptions& opts = {});

MinorMultiplicityMap minor_multiplicities(const GroundSet& set, std::size_t n,
                                          const EngineOptions& opts = {});

/// First-row Laplace expansion: the cofactor vector m of the bottom block
/// turns det = d into the linear equation <r, m> = d in the first row r,
/// which is solved for the first nonzero coordinate of m.
BigCount count_det_rowblock(const GroundSet& set, std::size_t n,
                            const Scalar& d, const EngineOptions& opts = {});

/// Same engine with the multiplicity map built once and reused across d.
class RowBlockCounter {
 public:
  RowBlockCounter(const GroundSet& set, std::size_t n,
                  const EngineOptions& opts = {});

  BigCount count(const Scalar& d) const;
  SpectrumHistogram spectrum() const;
  const MinorMultiplicityMap& multiplicities() const { return minors_; }

 private:
  GroundSet set_;
  std::size_t n_;
  EngineOptions opts_;
  MinorMultiplicityMap minors_;
  // Machine-word copy of the set and the keys when every value is a small
  // integer (rationals) or a residue (F_p); empty otherwise.
  struct WordLane {
    bool residues = false;
    std::vector<std::int64_t> elements;
    std::vector<std::int64_t> keys;  // entries.size() * n, row-major
  };
  std::optional<WordLane> lane_;
};

/// D_2(X, d) = sum_t P(t) P(t - d) over the pair-product distribution P.
BigCount count_det_conv_n2(const GroundSet& set, const Scalar& d);
SpectrumHistogram det_spectrum_conv_n2(const GroundSet& set);

enum class SpectrumEngine { kBrute, kRowBlock };

SpectrumHistogram det_spectrum(const GroundSet& set, std::size_t n,
                               SpectrumEngine engine,
                               const EngineOptions& opts = {});

/// Argmax of the spectrum. Ties go to the smallest |d| (smallest residue in
/// F_p), then to the positive value.
std::pair<Scalar, BigCount> dsup(const SpectrumHistogram& spectrum,
                                 bool exclude_zero);
std::pair<Scalar, BigCount> dsup(const GroundSet& set, std::size_t n,
                                 bool exclude_zero,
                                 const EngineOptions& opts = {});

/// Number of m x n matrices over X of rank exactly r (0 <= r <= m <= n).
BigCount count_rank(const GroundSet& set, std::size_t m, std::size_t n,
                    std::size_t r, const EngineOptions& opts = {});

/// Partition of the det-d matrices written as [[Y, y^t], [z, x]].
struct DecompositionCounts {
  BigCount corner_zero;  // x = 0
  BigCount y_singular;   // x != 0, det Y = 0
  BigCount y_regular;    // x != 0, det Y != 0
  BigCount total() const { return corner_zero + y_singular + y_regular; }
};

DecompositionCounts count_decomposition(const GroundSet& set, std::size_t n,
                                        const Scalar& d,
                                        const EngineOptions& opts = {});

}  // namespace detlab

#pragma once

// Point/hyperplane incidences on Cartesian-product grids, the axis-aligned
// cell decomposition used to split incidences into sparse, spanning and
// degenerate classes, and the planes and curves arising from 3 x 3
// determinant equations.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "detlab/parallel.hpp"
#include "detlab/scalar.hpp"

namespace detlab {

/// A_1 x ... x A_k.
struct PointGrid {
  std::vector<GroundSet> axes;

  std::size_t dim() const { return axes.size(); }
  std::uint64_t size() const;
  const FieldSpec& field() const { return axes.front().field(); }
};

/// Throws on k = 0 or axes over different fields.
PointGrid make_grid(std::vector<GroundSet> axes);

/// <coeffs, x> = offset, normalized so the first nonzero coefficient is 1.
struct Hyperplane {
  std::vector<Scalar> coeffs;
  Scalar offset;

  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
};

bool on_plane(const FieldSpec& f, const Hyperplane& plane,
              std::span<const Scalar> point);

/// Projectively deduplicated hyperplanes with additive multiplicity weights.
class HyperplaneFamily {
 public:
  HyperplaneFamily(std::size_t k, FieldSpec field);

  /// Normalizes and inserts; a projectively equal plane already present has
  /// its weight increased instead. Throws on an all-zero coefficient vector.
  std::size_t add(std::vector<Scalar> coeffs, Scalar offset,
                  std::uint64_t weight = 1);

  std::size_t dim() const { return k_; }
  const FieldSpec& field() const { return field_; }
  std::size_t size() const { return planes_.size(); }
  const std::vector<Hyperplane>& planes() const { return planes_; }
  const std::vector<std::uint64_t>& weights() const { return weights_; }

 private:
  std::size_t k_;
  FieldSpec field_;
  std::vector<Hyperplane> planes_;
  std::vector<std::uint64_t> weights_;
  std::unordered_map<std::vector<Scalar>, std::size_t, ScalarVectorHash> index_;
};

/// Number of (point, plane) pairs with the point on the plane.
BigCount incidences_brute(const PointGrid& grid, const HyperplaneFamily& planes,
                          const EngineOptions& opts = {});
/// Same, with each plane counted by its weight.
BigCount weighted_incidences(const PointGrid& grid,
                             const HyperplaneFamily& planes,
                             const EngineOptions& opts = {});

/// r = min{max{floor((#P^k / #Pi)^(1/(k^2-1))), 1}, A_k}, in exact
/// integer arithmetic.
std::size_t choose_r(const PointGrid& grid, const HyperplaneFamily& planes);

struct CellDecomposition {
  std::size_t k = 0;
  std::size_t r = 0;
  /// Axis indices sorted by non-increasing cardinality (A_1 >= ... >= A_k).
  std::vector<std::size_t> axis_order;
  /// Per axis: the r - 1 cut positions, midpoints between groups.
  std::vector<std::vector<Scalar>> cuts;
  /// Per axis: element index -> group index.
  std::vector<std::vector<std::size_t>> group_of;
  /// Per axis, per group: smallest and largest coordinate in the group.
  std::vector<std::vector<std::pair<Scalar, Scalar>>> group_bounds;
  /// Points per cell; cells indexed mixed-radix r over axes in grid order.
  std::vector<std::uint64_t> population;

  // Incidence classes, filled by classify_incidences.
  BigCount sparse;      // at most k - 1 on-plane points in the cell
  BigCount spanning;    // on-plane points of the cell span the plane
  BigCount degenerate;  // the rest

  /// Non-degeneracy diagnostic: the plane maximizing
  /// (points on one (k-2)-flat) / (points on the plane). Planes with more
  /// than kFlatScanLimit grid points are skipped.
  std::uint64_t worst_flat_mass = 0;
  std::uint64_t worst_plane_mass = 0;
  std::size_t planes_skipped = 0;

  static constexpr std::size_t kFlatScanLimit = 48;

  std::size_t cell_count() const { return population.size(); }
  BigCount total() const { return sparse + spanning + degenerate; }
};

/// Splits every axis into r groups of consecutive elements with sizes
/// ceil(A/r) or floor(A/r); cuts sit at midpoints so no point is on a cut.
/// Ordered fields only.
CellDecomposition cell_decompose(const PointGrid& grid, std::size_t r);

CellDecomposition classify_incidences(const PointGrid& grid,
                                      const HyperplaneFamily& planes,
                                      std::size_t r,
                                      const EngineOptions& opts = {});

/// Cells whose closed bounding box (hull of the cell's grid coordinates)
/// meets the plane.
std::size_t cells_hit(const Hyperplane& plane, const CellDecomposition& cells);

/// Planes <m, x> = d for every minor triple m of a 2 x 3 block over X,
/// weighted by multiplicity. Blocks with m = 0 go to zero_bucket.
struct MinorPlanes {
  HyperplaneFamily family;
  std::uint64_t zero_bucket = 0;
};
MinorPlanes planes_from_minors(const GroundSet& x, const Scalar& d,
                               const EngineOptions& opts = {});

/// Solutions of u1 (v2 - w2) - u2 (v1 - w1) + v1 w2 - v2 w1 = 0 over U^6,
/// counted directly and as points (r, s, t) = (u1, u2, v2) on the curves
/// RT - cR - S(a - b) - bT + ac = 0 with (a, b, c) = (v1, w1, w2).
struct CurveCounts {
  BigCount direct;
  BigCount via_curves;
};
CurveCounts curve_incidences_n3(const GroundSet& u, const EngineOptions& opts = {});

}  // namespace detlab

#include "detlab/incidence.hpp"

#include <algorithm>
#include <numeric>

#include "detlab/detcount.hpp"
#include "detlab/error.hpp"
#include "detlab/matrix.hpp"

namespace detlab {
namespace {

BigCount big(std::uint64_t v) { return BigCount(static_cast<unsigned long>(v)); }

void check_budget(std::uint64_t cost, const EngineOptions& opts, const char* what) {
  if (cost > opts.budget) {
    fail_budget(std::string(what) + ": estimated cost " + std::to_string(cost) +
                " exceeds budget " + std::to_string(opts.budget));
  }
}

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

// Calls fn(indices, point) for every grid point in lexicographic order.
template <typename Fn>
void walk_grid(const PointGrid& grid, Fn&& fn) {
  const std::size_t k = grid.dim();
  std::vector<std::size_t> idx(k, 0);
  std::vector<Scalar> point(k);
  for (std::size_t i = 0; i < k; ++i) point[i] = grid.axes[i][0];
  for (;;) {
    fn(static_cast<const std::vector<std::size_t>&>(idx),
       static_cast<const std::vector<Scalar>&>(point));
    std::size_t i = k;
    while (i-- > 0) {
      if (++idx[i] < grid.axes[i].size()) {
        point[i] = grid.axes[i][idx[i]];
        break;
      }
      idx[i] = 0;
      point[i] = grid.axes[i][0];
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

std::size_t affine_rank(const FieldSpec& f,
                        const std::vector<std::vector<Scalar>>& points) {
  if (points.size() <= 1) return 0;
  const std::size_t k = points.front().size();
  Matrix diffs(points.size() - 1, k, f);
  for (std::size_t i = 1; i < points.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) diffs(i - 1, j) = f.sub(points[i][j], points[0][j]);
  }
  return rank(diffs);
}

// Largest number of `points` on one affine (k-2)-flat.
std::uint64_t max_flat_mass(const FieldSpec& f,
                            const std::vector<std::vector<Scalar>>& points,
                            std::size_t k) {
  const std::size_t s = points.size();
  if (s == 0) return 0;
  if (k < 2) return 0;
  if (k == 2) return 1;
  const std::size_t flat_dim = k - 2;
  if (affine_rank(f, points) <= flat_dim) return s;
  // Every (k-2)-flat carrying the maximum is spanned by k-1 of its points.
  std::uint64_t best = std::min<std::size_t>(s, k - 1);
  std::vector<std::size_t> pick(k - 1);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<std::vector<Scalar>> basis(k - 1);
  for (;;) {
    for (std::size_t i = 0; i < k - 1; ++i) basis[i] = points[pick[i]];
    if (affine_rank(f, basis) == flat_dim) {
      std::uint64_t mass = 0;
      for (const auto& p : points) {
        basis.push_back(p);
        if (affine_rank(f, basis) == flat_dim) ++mass;
        basis.pop_back();
      }
      best = std::max(best, mass);
    }
    std::size_t i = k - 1;
    while (i-- > 0) {
      if (pick[i] < s - (k - 1 - i)) {
        ++pick[i];
        for (std::size_t j = i + 1; j < k - 1; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return best;
}

std::size_t cell_index(const CellDecomposition& cells,
                       const std::vector<std::size_t>& idx) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < cells.k; ++i) c = c * cells.r + cells.group_of[i][idx[i]];
  return c;
}

}  // namespace

std::uint64_t PointGrid::size() const {
  std::uint64_t total = 1;
  for (const GroundSet& a : axes) total = checked_product(total, a.size());
  return total;
}

PointGrid make_grid(std::vector<GroundSet> axes) {
  if (axes.empty()) fail("grid needs at least one axis");
  for (const GroundSet& a : axes) {
    if (!(a.field() == axes.front().field())) fail("grid axes must share a field");
  }
  return PointGrid{std::move(axes)};
}

bool on_plane(const FieldSpec& f, const Hyperplane& plane,
              std::span<const Scalar> point) {
  Scalar acc;
  for (std::size_t i = 0; i < point.size(); ++i) f.add_mul(acc, plane.coeffs[i], point[i]);
  return acc == plane.offset;
}

HyperplaneFamily::HyperplaneFamily(std::size_t k, FieldSpec field)
    : k_(k), field_(field) {
  if (k == 0) fail("hyperplanes need dimension >= 1");
}

std::size_t HyperplaneFamily::add(std::vector<Scalar> coeffs, Scalar offset,
                                  std::uint64_t weight) {
  if (coeffs.size() != k_) fail("hyperplane dimension mismatch");
  const auto lead = std::find_if(coeffs.begin(), coeffs.end(),
                                 [](const Scalar& s) { return !s.is_zero(); });
  if (lead == coeffs.end()) fail("hyperplane coefficients are all zero");
  const Scalar scale = field_.inv(*lead);
  for (Scalar& c : coeffs) c = field_.mul(c, scale);
  offset = field_.mul(offset, scale);

  std::vector<Scalar> key = coeffs;
  key.push_back(offset);
  const auto [it, inserted] = index_.emplace(std::move(key), planes_.size());
  if (inserted) {
    planes_.push_back(Hyperplane{std::move(coeffs), std::move(offset)});
    weights_.push_back(weight);
  } else {
    weights_[it->second] += weight;
  }
  return it->second;
}

namespace {

template <bool kWeighted>
BigCount count_incidences(const PointGrid& grid, const HyperplaneFamily& planes,
                          const EngineOptions& opts) {
  if (grid.dim() != planes.dim()) fail("grid and hyperplane dimensions differ");
  check_budget(checked_product(grid.size(), planes.size()), opts, "incidences");
  const FieldSpec& f = grid.field();
  std::vector<BigCount> partial(resolve_threads(opts.threads));
  parallel_ranges(planes.size(), opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    BigCount acc = 0;
                    for (std::uint64_t p = begin; p < end; ++p) {
                      std::uint64_t hits = 0;
                      walk_grid(grid, [&](const auto&, const std::vector<Scalar>& pt) {
                        if (on_plane(f, planes.planes()[p], pt)) ++hits;
                      });
                      acc += kWeighted ? big(hits) * big(planes.weights()[p]) : big(hits);
                    }
                    partial[w] = acc;
                  });
  BigCount total = 0;
  for (const BigCount& p : partial) total += p;
  return total;
}

}  // namespace

BigCount incidences_brute(const PointGrid& grid, const HyperplaneFamily& planes,
                          const EngineOptions& opts) {
  return count_incidences<false>(grid, planes, opts);
}

BigCount weighted_incidences(const PointGrid& grid, const HyperplaneFamily& planes,
                             const EngineOptions& opts) {
  return count_incidences<true>(grid, planes, opts);
}

std::size_t choose_r(const PointGrid& grid, const HyperplaneFamily& planes) {
  const std::size_t k = grid.dim();
  if (k < 2) fail("choose_r needs k >= 2");
  if (planes.size() == 0) fail("choose_r needs at least one hyperplane");
  std::size_t smallest = grid.axes.front().size();
  for (const GroundSet& a : grid.axes) smallest = std::min(smallest, a.size());

  BigCount points_k;
  mpz_pow_ui(points_k.get_mpz_t(), big(grid.size()).get_mpz_t(), k);
  const BigCount family = big(planes.size());
  const auto fits = [&](std::size_t r) {
    BigCount lhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), r, k * k - 1);
    return lhs * family <= points_k;
  };
  std::size_t r = 1;
  while (r < smallest && fits(r + 1)) ++r;
  return r;
}

CellDecomposition cell_decompose(const PointGrid& grid, std::size_t r) {
  const FieldSpec& f = grid.field();
  if (!f.is_ordered()) fail("cell decomposition needs an ordered field");
  const std::size_t k = grid.dim();
  CellDecomposition out;
  out.k = k;
  out.r = r;
  out.axis_order.resize(k);
  std::iota(out.axis_order.begin(), out.axis_order.end(), 0);
  std::stable_sort(out.axis_order.begin(), out.axis_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return grid.axes[a].size() > grid.axes[b].size();
                   });
  const std::size_t smallest = grid.axes[out.axis_order.back()].size();
  if (r < 1 || r > smallest) {
    fail("slicing parameter r = " + std::to_string(r) + " outside [1, " +
         std::to_string(smallest) + "]");
  }

  const Scalar half = f.from_rational(mpq_class(1, 2));
  std::vector<std::vector<std::uint64_t>> group_sizes(k);
  for (std::size_t axis = 0; axis < k; ++axis) {
    const GroundSet& a = grid.axes[axis];
    const std::size_t base = a.size() / r;
    const std::size_t extra = a.size() % r;
    std::vector<std::size_t> groups(a.size());
    std::vector<std::pair<Scalar, Scalar>> bounds;
    std::vector<Scalar> cuts;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < r; ++g) {
      const std::size_t len = base + (g < extra ? 1 : 0);
      for (std::size_t i = 0; i < len; ++i) groups[pos + i] = g;
      bounds.emplace_back(a[pos], a[pos + len - 1]);
      group_sizes[axis].push_back(len);
      pos += len;
      if (g + 1 < r) cuts.push_back(f.mul(f.add(a[pos - 1], a[pos]), half));
    }
    out.group_of.push_back(std::move(groups));
    out.group_bounds.push_back(std::move(bounds));
    out.cuts.push_back(std::move(cuts));
  }

  std::size_t cells = 1;
  for (std::size_t i = 0; i < k; ++i) cells *= r;
  out.population.assign(cells, 1);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    for (std::size_t axis = k; axis-- > 0;) {
      out.population[c] *= group_sizes[axis][rest % r];
      rest /= r;
    }
  }
  return out;
}

CellDecomposition classify_incidences(const PointGrid& grid,
                                      const HyperplaneFamily& planes,
                                      std::size_t r, const EngineOptions& opts) {
  if (grid.dim() != planes.dim()) fail("grid and hyperplane dimensions differ");
  check_budget(checked_product(grid.size(), planes.size()), opts, "classify");
  CellDecomposition cells = cell_decompose(grid, r);
  const FieldSpec& f = grid.field();
  const std::size_t k = grid.dim();

  struct Partial {
    BigCount sparse, spanning, degenerate;
    std::uint64_t flat = 0, mass = 0;
    std::size_t skipped = 0;
  };
  std::vector<Partial> partial(resolve_threads(opts.threads));
  parallel_ranges(
      planes.size(), opts.threads, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        Partial acc;
        for (std::uint64_t p = begin; p < end; ++p) {
          const Hyperplane& plane = planes.planes()[p];
          std::unordered_map<std::size_t, std::vector<std::vector<Scalar>>> by_cell;
          std::vector<std::vector<Scalar>> all;
          walk_grid(grid, [&](const std::vector<std::size_t>& idx,
                              const std::vector<Scalar>& pt) {
            if (!on_plane(f, plane, pt)) return;
            by_cell[cell_index(cells, idx)].push_back(pt);
            all.push_back(pt);
          });
          for (const auto& [cell, pts] : by_cell) {
            const BigCount n = big(pts.size());
            if (pts.size() <= k - 1) {
              acc.sparse += n;
            } else if (affine_rank(f, pts) == k - 1) {
              acc.spanning += n;
            } else {
              acc.degenerate += n;
            }
          }
          if (all.empty()) continue;
          if (all.size() > CellDecomposition::kFlatScanLimit) {
            ++acc.skipped;
            continue;
          }
          const std::uint64_t flat = max_flat_mass(f, all, k);
          if (acc.mass == 0 || flat * acc.mass > acc.flat * all.size()) {
            acc.flat = flat;
            acc.mass = all.size();
          }
        }
        partial[w] = std::move(acc);
      });
  for (const Partial& p : partial) {
    cells.sparse += p.sparse;
    cells.spanning += p.spanning;
    cells.degenerate += p.degenerate;
    cells.planes_skipped += p.skipped;
    if (p.mass != 0 && (cells.worst_plane_mass == 0 ||
                        p.flat * cells.worst_plane_mass > cells.worst_flat_mass * p.mass)) {
      cells.worst_flat_mass = p.flat;
      cells.worst_plane_mass = p.mass;
    }
  }
  return cells;
}

std::size_t cells_hit(const Hyperplane& plane, const CellDecomposition& cells) {
  if (plane.coeffs.size() != cells.k) fail("plane and cells dimensions differ");
  const FieldSpec f;
  std::size_t hit = 0;
  for (std::size_t c = 0; c < cells.cell_count(); ++c) {
    Scalar lo, hi;
    std::size_t rest = c;
    for (std::size_t axis = cells.k; axis-- > 0;) {
      const auto& [min, max] = cells.group_bounds[axis][rest % cells.r];
      rest /= cells.r;
      const Scalar& a = plane.coeffs[axis];
      if (a.sign() >= 0) {
        f.add_mul(lo, a, min);
        f.add_mul(hi, a, max);
      } else {
        f.add_mul(lo, a, max);
        f.add_mul(hi, a, min);
      }
    }
    if (lo <= plane.offset && plane.offset <= hi) ++hit;
  }
  return hit;
}

MinorPlanes planes_from_minors(const GroundSet& x, const Scalar& d,
                               const EngineOptions& opts) {
  if (!x.field().contains(d)) fail("offset is not in " + x.field().name());
  const MinorMultiplicityMap minors = minor_multiplicities(x, 3, opts);
  MinorPlanes out{HyperplaneFamily(3, x.field()), minors.zero_count};
  for (const auto& [key, mu] : minors.entries) out.family.add(key, d, mu);
  return out;
}

CurveCounts curve_incidences_n3(const GroundSet& u, const EngineOptions& opts) {
  const std::size_t x = u.size();
  check_budget(saturating_pow(x, 6), opts, "curve incidences");
  const FieldSpec& f = u.field();
  CurveCounts out;

  std::vector<std::uint64_t> direct(resolve_threads(opts.threads), 0);
  parallel_ranges(saturating_pow(x, 6), opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    if (begin >= end) return;
                    IndexOdometer odo(x, 6, begin);
                    std::uint64_t hits = 0;
                    for (std::uint64_t i = begin; i < end; ++i, odo.next()) {
                      const auto& g = odo.digits();
                      const Scalar &u1 = u[g[0]], &u2 = u[g[1]], &v1 = u[g[2]],
                                   &v2 = u[g[3]], &w1 = u[g[4]], &w2 = u[g[5]];
                      Scalar lhs = f.mul(u1, f.sub(v2, w2));
                      lhs = f.sub(lhs, f.mul(u2, f.sub(v1, w1)));
                      lhs = f.add(lhs, f.sub(f.mul(v1, w2), f.mul(v2, w1)));
                      if (lhs.is_zero()) ++hits;
                    }
                    direct[w] = hits;
                  });
  for (std::uint64_t h : direct) out.direct += big(h);

  // Curve (a, b, c), point (r, s, t): solve for s unless a = b.
  std::vector<std::uint64_t> curves(resolve_threads(opts.threads), 0);
  parallel_ranges(saturating_pow(x, 3), opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    if (begin >= end) return;
                    IndexOdometer odo(x, 3, begin);
                    std::uint64_t hits = 0;
                    for (std::uint64_t i = begin; i < end; ++i, odo.next()) {
                      const Scalar &a = u[odo.digits()[0]], &b = u[odo.digits()[1]],
                                   &c = u[odo.digits()[2]];
                      const Scalar slope = f.sub(a, b);
                      for (const Scalar& r : u.elements()) {
                        for (const Scalar& t : u.elements()) {
                          // rt - cr - bt + ac = s (a - b)
                          Scalar rhs = f.mul(r, t);
                          rhs = f.sub(rhs, f.mul(c, r));
                          rhs = f.sub(rhs, f.mul(b, t));
                          rhs = f.add(rhs, f.mul(a, c));
                          if (slope.is_zero()) {
                            if (rhs.is_zero()) hits += x;
                          } else if (u.contains(f.div(rhs, slope))) {
                            ++hits;
                          }
                        }
                      }
                    }
                    curves[w] = hits;
                  });
  for (std::uint64_t h : curves) out.via_curves += big(h);
  return out;
}

}  // namespace detlab

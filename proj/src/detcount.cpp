#include "detlab/detcount.hpp"

#include <algorithm>
#include <span>
#include <unordered_map>

#include "detlab/error.hpp"
#include "detlab/matrix.hpp"

namespace detlab {
namespace {

using u128 = unsigned __int128;
using ScalarTally = std::unordered_map<Scalar, std::uint64_t, ScalarHash>;
using VectorTally =
    std::unordered_map<std::vector<Scalar>, std::uint64_t, ScalarVectorHash>;

BigCount to_big(u128 v) {
  mpz_class hi(static_cast<unsigned long>(v >> 64));
  mpz_class lo(static_cast<unsigned long>(v));
  return (hi << 64) + lo;
}

BigCount to_big(std::uint64_t v) { return BigCount(static_cast<unsigned long>(v)); }

BigCount big_pow(std::size_t base, std::size_t exp) {
  BigCount r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

constexpr std::int64_t kLaneLimit = std::int64_t{1} << 60;
using i128 = __int128;

bool to_word(const Scalar& s, bool residues, std::int64_t& out) {
  if (!s.is_integer() || !mpz_fits_slong_p(s.numerator().get_mpz_t())) {
    return false;
  }
  const long v = s.numerator().get_si();
  if (!residues && (v >= kLaneLimit || v <= -kLaneLimit)) return false;
  out = v;
  return true;
}

Scalar from_i128(const FieldSpec& f, i128 v) {
  const bool negative = v < 0;
  const u128 mag = negative ? -static_cast<u128>(v) : static_cast<u128>(v);
  BigCount z = to_big(mag);
  if (negative) z = -z;
  return f.from_integer(z);
}

struct I128Hash {
  std::size_t operator()(i128 v) const noexcept {
    const auto u = static_cast<u128>(v);
    return std::hash<std::uint64_t>()(static_cast<std::uint64_t>(u) ^
                                      (static_cast<std::uint64_t>(u >> 64) *
                                       0x9e3779b97f4a7c15ULL));
  }
};

// <row, key> over Z in 128-bit, or mod p when `p` is nonzero.
i128 word_dot(std::span<const std::int64_t> elements,
              const std::vector<std::size_t>& digits,
              std::span<const std::int64_t> key, std::uint64_t p) {
  if (p == 0) {
    i128 acc = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
      acc += static_cast<i128>(elements[digits[i]]) * key[i];
    }
    return acc;
  }
  u128 acc = 0;
  for (std::size_t i = 0; i < key.size(); ++i) {
    acc = (acc + static_cast<u128>(elements[digits[i]]) *
                     static_cast<std::uint64_t>(key[i])) % p;
  }
  return static_cast<i128>(acc);
}

void check_budget(std::uint64_t cost, const EngineOptions& opts,
                  const std::string& engine) {
  if (cost > opts.budget) {
    fail_budget(engine + ": estimated cost " + std::to_string(cost) +
                " exceeds budget " + std::to_string(opts.budget));
  }
}

void check_field(const GroundSet& set, const Scalar& d) {
  if (!set.field().contains(d)) {
    fail("determinant target " + d.to_string() + " is not in " +
         set.field().name());
  }
}

std::map<Scalar, BigCount> merge_tallies(const std::vector<ScalarTally>& parts) {
  ScalarTally total;
  for (const auto& part : parts) {
    for (const auto& [key, count] : part) total[key] += count;
  }
  std::map<Scalar, BigCount> out;
  for (const auto& [key, count] : total) out.emplace(key, to_big(count));
  return out;
}

// Walks the matrices with linear index in [begin, end), keeping `m` in sync
// with the odometer and calling visit(m) for each.
template <typename Visit>
void walk_matrices(const GroundSet& set, std::size_t rows, std::size_t cols,
                   std::uint64_t begin, std::uint64_t end, Visit&& visit) {
  if (begin >= end) return;
  const std::size_t cells = rows * cols;
  IndexOdometer odo(set.size(), cells, begin);
  Matrix m(rows, cols, set.field());
  for (std::size_t c = 0; c < cells; ++c) {
    m(c / cols, c % cols) = set[odo.digits()[c]];
  }
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    visit(m);
    if (idx + 1 == end) break;
    const std::size_t changed = odo.next();
    for (std::size_t c = changed; c < cells; ++c) {
      m(c / cols, c % cols) = set[odo.digits()[c]];
    }
  }
}

// Signed first-row cofactors of an n x n matrix whose bottom n-1 rows are
// `block` ((n-1) x n). Entry j is (-1)^j times the minor without column j.
void cofactor_vector(const FieldSpec& f, const Matrix& block,
                     std::vector<Scalar>& out) {
  const std::size_t n = block.cols();
  out.resize(n);
  if (n == 2) {
    out[0] = block(0, 1);
    out[1] = f.neg(block(0, 0));
    return;
  }
  if (n == 3) {
    const auto two = [&](std::size_t a, std::size_t b) {
      return f.sub(f.mul(block(0, a), block(1, b)), f.mul(block(0, b), block(1, a)));
    };
    out[0] = two(1, 2);
    out[1] = f.neg(two(0, 2));
    out[2] = two(0, 1);
    return;
  }
  Matrix sub(n - 1, n - 1, f);
  for (std::size_t skip = 0; skip < n; ++skip) {
    for (std::size_t i = 0; i < n - 1; ++i) {
      for (std::size_t j = 0, oj = 0; j < n; ++j) {
        if (j != skip) sub(i, oj++) = block(i, j);
      }
    }
    const Scalar minor = det(sub);
    out[skip] = (skip % 2 == 0) ? minor : f.neg(minor);
  }
}

std::map<Scalar, std::uint64_t> product_table(const GroundSet& set) {
  const FieldSpec& f = set.field();
  std::unordered_map<Scalar, std::uint64_t, ScalarHash> tally;
  for (const Scalar& a : set.elements()) {
    for (const Scalar& b : set.elements()) ++tally[f.mul(a, b)];
  }
  return {tally.begin(), tally.end()};
}

}  // namespace

BigCount SpectrumHistogram::at(const Scalar& d) const {
  const auto it = counts.find(d);
  return it == counts.end() ? BigCount(0) : it->second;
}

BigCount SpectrumHistogram::total_mass() const {
  BigCount total = 0;
  for (const auto& [d, c] : counts) total += c;
  return total;
}

std::uint64_t MinorMultiplicityMap::total_mass() const {
  std::uint64_t total = zero_count;
  for (const auto& [key, mu] : entries) total += mu;
  return total;
}

std::uint64_t brute_cost(std::size_t set_size, std::size_t n) {
  return saturating_pow(set_size, n * n);
}

std::uint64_t rowblock_cost(std::size_t set_size, std::size_t n) {
  return saturating_pow(set_size, n * (n - 1));
}

BigCount count_det_brute(const GroundSet& set, std::size_t n, const Scalar& d,
                         const EngineOptions& opts) {
  if (n < 1) fail("dimension must be at least 1");
  check_field(set, d);
  const std::uint64_t total = brute_cost(set.size(), n);
  check_budget(total, opts, "brute");
  std::vector<std::uint64_t> partial(resolve_threads(opts.threads), 0);
  parallel_ranges(total, opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    std::uint64_t hits = 0;
                    walk_matrices(set, n, n, begin, end, [&](const Matrix& m) {
                      if (det(m) == d) ++hits;
                    });
                    partial[w] = hits;
                  });
  BigCount sum = 0;
  for (std::uint64_t p : partial) sum += to_big(p);
  return sum;
}

MinorMultiplicityMap minor_multiplicities(const GroundSet& set, std::size_t n,
                                          const EngineOptions& opts) {
  if (n < 2) fail("row-block engine needs n >= 2");
  const std::uint64_t blocks = rowblock_cost(set.size(), n);
  check_budget(blocks, opts, "rowblock");
  const FieldSpec& f = set.field();
  const unsigned workers = resolve_threads(opts.threads);
  std::vector<VectorTally> tallies(workers);
  std::vector<std::uint64_t> zeros(workers, 0);

  parallel_ranges(blocks, opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    std::vector<Scalar> key;
                    walk_matrices(set, n - 1, n, begin, end, [&](const Matrix& b) {
                      cofactor_vector(f, b, key);
                      if (std::all_of(key.begin(), key.end(),
                                      [](const Scalar& s) { return s.is_zero(); })) {
                        ++zeros[w];
                      } else {
                        ++tallies[w][key];
                      }
                    });
                  });

  MinorMultiplicityMap out;
  out.n = n;
  VectorTally merged = std::move(tallies[0]);
  for (unsigned w = 1; w < workers; ++w) {
    for (auto& [key, mu] : tallies[w]) merged[key] += mu;
  }
  for (std::uint64_t z : zeros) out.zero_count += z;
  out.entries.assign(merged.begin(), merged.end());
  std::sort(out.entries.begin(), out.entries.end());
  return out;
}

RowBlockCounter::RowBlockCounter(const GroundSet& set, std::size_t n,
                                 const EngineOptions& opts)
    : set_(set), n_(n), opts_(opts), minors_(minor_multiplicities(set, n, opts)) {
  WordLane lane;
  lane.residues = set.field().is_prime_field();
  std::int64_t w = 0;
  for (const Scalar& x : set.elements()) {
    if (!to_word(x, lane.residues, w)) return;
    lane.elements.push_back(w);
  }
  lane.keys.reserve(minors_.entries.size() * n);
  for (const auto& [key, mu] : minors_.entries) {
    for (const Scalar& k : key) {
      if (!to_word(k, lane.residues, w)) return;
      lane.keys.push_back(w);
    }
  }
  lane_ = std::move(lane);
}

BigCount RowBlockCounter::count(const Scalar& d) const {
  check_field(set_, d);
  const FieldSpec& f = set_.field();
  const std::size_t x = set_.size();
  const std::uint64_t prefixes = saturating_pow(x, n_ - 1);
  const auto& entries = minors_.entries;
  std::vector<u128> partial(resolve_threads(opts_.threads), 0);

  std::int64_t d_word = 0;
  if (lane_ && to_word(d, lane_->residues, d_word)) {
    const std::uint64_t p = lane_->residues ? f.modulus() : 0;
    const std::vector<std::int64_t>& elems = lane_->elements;
    parallel_ranges(
        entries.size(), opts_.threads,
        [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
          u128 acc = 0;
          std::vector<std::int64_t> rest;
          for (std::uint64_t e = begin; e < end; ++e) {
            const std::span<const std::int64_t> key(lane_->keys.data() + e * n_, n_);
            std::size_t pivot = 0;
            while (key[pivot] == 0) ++pivot;
            rest.clear();
            for (std::size_t i = 0; i < n_; ++i) {
              if (i != pivot) rest.push_back(key[i]);
            }
            const std::int64_t piv = key[pivot];
            std::int64_t piv_inv = 0;
            if (p != 0) to_word(f.inv(f.from_int(piv)), true, piv_inv);
            std::uint64_t hits = 0;
            IndexOdometer odo(x, n_ - 1, 0);
            for (std::uint64_t q = 0; q < prefixes; ++q, odo.next()) {
              const i128 sum = word_dot(elems, odo.digits(), rest, p);
              i128 target = 0;
              if (p == 0) {
                const i128 num = static_cast<i128>(d_word) - sum;
                if (num % piv != 0) continue;
                target = num / piv;
                if (target >= kLaneLimit || target <= -kLaneLimit) continue;
              } else {
                const i128 num = ((static_cast<i128>(d_word) - sum) % static_cast<i128>(p) +
                                  static_cast<i128>(p)) % static_cast<i128>(p);
                target = static_cast<i128>(static_cast<u128>(num) *
                                           static_cast<std::uint64_t>(piv_inv) % p);
              }
              if (std::binary_search(elems.begin(), elems.end(),
                                     static_cast<std::int64_t>(target))) {
                ++hits;
              }
            }
            acc += static_cast<u128>(hits) * entries[e].second;
          }
          partial[w] = acc;
        });
    BigCount total = 0;
    for (u128 part : partial) total += to_big(part);
    if (d.is_zero()) total += to_big(minors_.zero_count) * big_pow(x, n_);
    return total;
  }

  parallel_ranges(
      entries.size(), opts_.threads,
      [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        u128 acc = 0;
        std::vector<std::size_t> others;
        for (std::uint64_t e = begin; e < end; ++e) {
          const auto& [m, mu] = entries[e];
          std::size_t pivot = 0;
          while (m[pivot].is_zero()) ++pivot;
          others.clear();
          for (std::size_t i = 0; i < n_; ++i) {
            if (i != pivot) others.push_back(i);
          }
          const Scalar pivot_inv = f.inv(m[pivot]);
          std::uint64_t hits = 0;
          IndexOdometer odo(x, n_ - 1, 0);
          for (std::uint64_t p = 0; p < prefixes; ++p) {
            Scalar partial_sum;
            for (std::size_t k = 0; k < others.size(); ++k) {
              f.add_mul(partial_sum, set_[odo.digits()[k]], m[others[k]]);
            }
            if (set_.contains(f.mul(f.sub(d, partial_sum), pivot_inv))) ++hits;
            odo.next();
          }
          acc += static_cast<u128>(hits) * mu;
        }
        partial[w] = acc;
      });

  BigCount total = 0;
  for (u128 p : partial) total += to_big(p);
  if (d.is_zero()) total += to_big(minors_.zero_count) * big_pow(x, n_);
  return total;
}

SpectrumHistogram RowBlockCounter::spectrum() const {
  const FieldSpec& f = set_.field();
  const std::size_t x = set_.size();
  const std::uint64_t rows = saturating_pow(x, n_);
  const auto& entries = minors_.entries;
  check_budget(entries.size() * rows, opts_, "rowblock spectrum");
  std::vector<ScalarTally> tallies(resolve_threads(opts_.threads));

  if (lane_) {
    const std::uint64_t p = lane_->residues ? f.modulus() : 0;
    using WordTally = std::unordered_map<i128, std::uint64_t, I128Hash>;
    std::vector<WordTally> words(tallies.size());
    parallel_ranges(entries.size(), opts_.threads,
                    [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                      for (std::uint64_t e = begin; e < end; ++e) {
                        const std::span<const std::int64_t> key(
                            lane_->keys.data() + e * n_, n_);
                        IndexOdometer odo(x, n_, 0);
                        for (std::uint64_t r = 0; r < rows; ++r, odo.next()) {
                          words[w][word_dot(lane_->elements, odo.digits(), key, p)] +=
                              entries[e].second;
                        }
                      }
                    });
    for (std::size_t w = 0; w < words.size(); ++w) {
      for (const auto& [value, count] : words[w]) tallies[w][from_i128(f, value)] += count;
    }
  } else {
    parallel_ranges(entries.size(), opts_.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t e = begin; e < end; ++e) {
                      const auto& [m, mu] = entries[e];
                      IndexOdometer odo(x, n_, 0);
                      for (std::uint64_t r = 0; r < rows; ++r) {
                        Scalar value;
                        for (std::size_t i = 0; i < n_; ++i) {
                          f.add_mul(value, set_[odo.digits()[i]], m[i]);
                        }
                        tallies[w][value] += mu;
                        odo.next();
                      }
                    }
                  });
  }

  SpectrumHistogram out;
  out.n = n_;
  out.set_size = x;
  out.field = f;
  out.counts = merge_tallies(tallies);
  if (minors_.zero_count != 0) {
    out.counts[f.zero()] += to_big(minors_.zero_count) * big_pow(x, n_);
  }
  return out;
}

BigCount count_det_rowblock(const GroundSet& set, std::size_t n,
                            const Scalar& d, const EngineOptions& opts) {
  return RowBlockCounter(set, n, opts).count(d);
}

BigCount count_det_conv_n2(const GroundSet& set, const Scalar& d) {
  check_field(set, d);
  const FieldSpec& f = set.field();
  const auto products = product_table(set);
  BigCount total = 0;
  for (const auto& [t, count] : products) {
    const auto it = products.find(f.sub(t, d));
    if (it != products.end()) total += to_big(count) * to_big(it->second);
  }
  return total;
}

SpectrumHistogram det_spectrum_conv_n2(const GroundSet& set) {
  const FieldSpec& f = set.field();
  const auto products = product_table(set);
  ScalarTally tally;
  for (const auto& [a, ca] : products) {
    for (const auto& [b, cb] : products) tally[f.sub(a, b)] += ca * cb;
  }
  SpectrumHistogram out;
  out.n = 2;
  out.set_size = set.size();
  out.field = f;
  out.counts = merge_tallies({tally});
  return out;
}

SpectrumHistogram det_spectrum(const GroundSet& set, std::size_t n,
                               SpectrumEngine engine, const EngineOptions& opts) {
  if (n < 1) fail("dimension must be at least 1");
  if (engine == SpectrumEngine::kRowBlock && n >= 2) {
    return RowBlockCounter(set, n, opts).spectrum();
  }
  const std::uint64_t total = brute_cost(set.size(), n);
  check_budget(total, opts, "brute spectrum");
  std::vector<ScalarTally> tallies(resolve_threads(opts.threads));
  parallel_ranges(total, opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    walk_matrices(set, n, n, begin, end,
                                  [&](const Matrix& m) { ++tallies[w][det(m)]; });
                  });
  SpectrumHistogram out;
  out.n = n;
  out.set_size = set.size();
  out.field = set.field();
  out.counts = merge_tallies(tallies);
  return out;
}

std::pair<Scalar, BigCount> dsup(const SpectrumHistogram& spectrum,
                                 bool exclude_zero) {
  const bool by_residue = spectrum.field.is_prime_field();
  const std::pair<Scalar, BigCount>* best = nullptr;
  std::pair<Scalar, BigCount> holder;
  for (const auto& entry : spectrum.counts) {
    const Scalar& d = entry.first;
    if (exclude_zero && d.is_zero()) continue;
    bool better = false;
    if (best == nullptr) {
      better = true;
    } else {
      const int c = cmp(entry.second, best->second);
      if (c > 0) {
        better = true;
      } else if (c == 0) {
        const Scalar& cur = best->first;
        if (by_residue) {
          better = d < cur;
        } else {
          const int a = cmp(abs(d.value()), abs(cur.value()));
          better = a < 0 || (a == 0 && d.sign() > cur.sign());
        }
      }
    }
    if (better) {
      holder = entry;
      best = &holder;
    }
  }
  if (best == nullptr) fail("spectrum has no nonzero determinant");
  return holder;
}

std::pair<Scalar, BigCount> dsup(const GroundSet& set, std::size_t n,
                                 bool exclude_zero, const EngineOptions& opts) {
  const SpectrumEngine engine =
      n >= 2 ? SpectrumEngine::kRowBlock : SpectrumEngine::kBrute;
  return dsup(det_spectrum(set, n, engine, opts), exclude_zero);
}

BigCount count_rank(const GroundSet& set, std::size_t m, std::size_t n,
                    std::size_t r, const EngineOptions& opts) {
  if (!(r <= m && m <= n) || m == 0) fail("count_rank requires 0 <= r <= m <= n, m >= 1");
  const std::uint64_t total = saturating_pow(set.size(), m * n);
  check_budget(total, opts, "rank");
  std::vector<std::uint64_t> partial(resolve_threads(opts.threads), 0);
  parallel_ranges(total, opts.threads,
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    std::uint64_t hits = 0;
                    walk_matrices(set, m, n, begin, end, [&](const Matrix& a) {
                      if (rank(a) == r) ++hits;
                    });
                    partial[w] = hits;
                  });
  BigCount sum = 0;
  for (std::uint64_t p : partial) sum += to_big(p);
  return sum;
}

DecompositionCounts count_decomposition(const GroundSet& set, std::size_t n,
                                        const Scalar& d,
                                        const EngineOptions& opts) {
  if (n < 2) fail("decomposition needs n >= 2");
  check_field(set, d);
  const std::uint64_t total = brute_cost(set.size(), n);
  check_budget(total, opts, "decomposition");
  struct Parts {
    std::uint64_t corner_zero = 0, y_singular = 0, y_regular = 0;
  };
  std::vector<Parts> partial(resolve_threads(opts.threads));
  parallel_ranges(
      total, opts.threads, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        Parts p;
        Matrix y_block(n - 1, n - 1, set.field());
        walk_matrices(set, n, n, begin, end, [&](const Matrix& a) {
          if (det(a) != d) return;
          if (a(n - 1, n - 1).is_zero()) {
            ++p.corner_zero;
            return;
          }
          for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = 0; j + 1 < n; ++j) y_block(i, j) = a(i, j);
          }
          if (det(y_block).is_zero()) {
            ++p.y_singular;
          } else {
            ++p.y_regular;
          }
        });
        partial[w] = p;
      });
  DecompositionCounts out;
  for (const Parts& p : partial) {
    out.corner_zero += to_big(p.corner_zero);
    out.y_singular += to_big(p.y_singular);
    out.y_regular += to_big(p.y_regular);
  }
  return out;
}

}  // namespace detlab

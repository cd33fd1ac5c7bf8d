#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace detlab {

/// Shared knobs for every enumeration engine.
struct EngineOptions {
  /// Maximum number of elementary enumeration steps an engine may take.
  std::uint64_t budget = 1'000'000'000ULL;
  /// Worker count; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested);

/// Splits [0, total) into at most `workers` contiguous ranges and runs
/// fn(worker_index, begin, end) for each on its own thread. The first
/// exception thrown by any worker is rethrown after all have joined.
template <typename Fn>
void parallel_ranges(std::uint64_t total, unsigned workers, Fn&& fn) {
  workers = resolve_threads(workers);
  if (total < workers) workers = total == 0 ? 1 : static_cast<unsigned>(total);
  if (workers <= 1) {
    fn(0u, std::uint64_t{0}, total);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = total / workers;
    const std::uint64_t extra = total % workers;
    std::uint64_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
      pool.emplace_back([&, w, begin, end] {
        try {
          fn(w, begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
      begin = end;
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Mixed-radix odometer over index tuples in [0, radix)^length, used to walk
/// a contiguous slice of the lexicographic enumeration of X^length.
class IndexOdometer {
 public:
  IndexOdometer(std::size_t radix, std::size_t length, std::uint64_t start)
      : radix_(radix), digits_(length, 0) {
    for (std::size_t i = length; i-- > 0;) {
      digits_[i] = static_cast<std::size_t>(start % radix);
      start /= radix;
    }
  }

  const std::vector<std::size_t>& digits() const { return digits_; }

  /// Advances by one; returns the position of the leftmost changed digit.
  std::size_t next() {
    std::size_t i = digits_.size();
    while (i-- > 0) {
      if (++digits_[i] < radix_) return i;
      digits_[i] = 0;
    }
    return 0;
  }

 private:
  std::size_t radix_;
  std::vector<std::size_t> digits_;
};

/// radix^exponent, saturating at UINT64_MAX.
std::uint64_t saturating_pow(std::uint64_t radix, std::uint64_t exponent);

}  // namespace detlab

#include "detlab/parallel.hpp"

#include <limits>

namespace detlab {

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::uint64_t saturating_pow(std::uint64_t radix, std::uint64_t exponent) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (radix != 0 && r > kMax / radix) return kMax;
    r *= radix;
  }
  return r;
}

}  // namespace detlab

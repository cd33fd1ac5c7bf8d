#pragma once

// Structured ground-set families: intervals, progressions, seeded random
// sets and explicit files.

#include <cstdint>
#include <string>

#include "detlab/scalar.hpp"

namespace detlab {

enum class FamilyKind {
  kInterval,
  kArithmeticProgression,
  kGeometricProgression,
  kRandom,
  kExplicit,
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::kInterval;
  std::size_t size = 1;

  // Arithmetic progression: start, start + step, ...
  std::string start = "1";
  std::string step = "1";
  // Geometric progression: ratio^1, ..., ratio^size.
  std::string ratio = "2";
  // Random: `size` distinct integers drawn uniformly from [lo, hi].
  std::uint64_t seed = 0;
  std::int64_t lo = 1;
  std::int64_t hi = 100;
  // Explicit: ground-set file; `size` is taken from the file.
  std::string path;
};

std::string family_kind_name(FamilyKind kind);
/// Accepts interval | ap | gp | random | explicit.
FamilyKind parse_family_kind(const std::string& text);

/// Kind-specific parameters as "key=value;..." (seed excluded).
std::string family_params(const FamilySpec& spec);

/// Deterministic in `spec`. Throws when the family cannot produce `size`
/// distinct elements (short GP period in F_p, narrow random range).
GroundSet generate(const FamilySpec& spec, const FieldSpec& field);

/// SplitMix64 output for the given counter under `seed`.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter);

}  // namespace detlab

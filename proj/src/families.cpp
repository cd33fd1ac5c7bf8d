#include "detlab/families.hpp"

#include <set>
#include <vector>

#include "detlab/error.hpp"

namespace detlab {
namespace {

GroundSet checked(std::vector<Scalar> values, const FieldSpec& field,
                  std::size_t expected, const char* what) {
  GroundSet set = make_ground_set(values, field);
  if (set.size() != expected) {
    fail(std::string(what) + " produced " + std::to_string(set.size()) +
         " distinct values, expected " + std::to_string(expected));
  }
  return set;
}

// Uniform value in [0, bound) by rejection on the top of the 64-bit range.
std::uint64_t uniform_below(std::uint64_t seed, std::uint64_t& counter,
                            std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    const std::uint64_t v = splitmix64(seed, counter++);
    if (v < limit) return v % bound;
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string family_kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kInterval: return "interval";
    case FamilyKind::kArithmeticProgression: return "ap";
    case FamilyKind::kGeometricProgression: return "gp";
    case FamilyKind::kRandom: return "random";
    case FamilyKind::kExplicit: return "explicit";
  }
  return "unknown";
}

FamilyKind parse_family_kind(const std::string& text) {
  if (text == "interval") return FamilyKind::kInterval;
  if (text == "ap") return FamilyKind::kArithmeticProgression;
  if (text == "gp") return FamilyKind::kGeometricProgression;
  if (text == "random") return FamilyKind::kRandom;
  if (text == "explicit") return FamilyKind::kExplicit;
  fail("unknown family '" + text + "'");
}

std::string family_params(const FamilySpec& spec) {
  switch (spec.kind) {
    case FamilyKind::kInterval: return "";
    case FamilyKind::kArithmeticProgression:
      return "start=" + spec.start + ";step=" + spec.step;
    case FamilyKind::kGeometricProgression: return "g=" + spec.ratio;
    case FamilyKind::kRandom:
      return "lo=" + std::to_string(spec.lo) + ";hi=" + std::to_string(spec.hi);
    case FamilyKind::kExplicit: return "path=" + spec.path;
  }
  return "";
}

GroundSet generate(const FamilySpec& spec, const FieldSpec& field) {
  if (spec.kind == FamilyKind::kExplicit) {
    return read_ground_set(spec.path, field);
  }
  if (spec.size < 1) fail("family size must be at least 1");
  const std::size_t n = spec.size;
  std::vector<Scalar> values;
  values.reserve(n);

  switch (spec.kind) {
    case FamilyKind::kInterval:
      for (std::size_t i = 1; i <= n; ++i) {
        values.push_back(field.from_int(static_cast<long>(i)));
      }
      return checked(std::move(values), field, n, "interval");

    case FamilyKind::kArithmeticProgression: {
      const Scalar start = parse_scalar(spec.start, field);
      const Scalar step = parse_scalar(spec.step, field);
      if (step.is_zero()) fail("AP step must be nonzero");
      Scalar v = start;
      for (std::size_t i = 0; i < n; ++i) {
        values.push_back(v);
        v = field.add(v, step);
      }
      return checked(std::move(values), field, n, "arithmetic progression");
    }

    case FamilyKind::kGeometricProgression: {
      const Scalar g = parse_scalar(spec.ratio, field);
      if (g.is_zero() || g == field.one() || g == field.from_int(-1)) {
        fail("GP ratio must not be 0, 1 or -1");
      }
      Scalar v = g;
      for (std::size_t i = 0; i < n; ++i) {
        values.push_back(v);
        v = field.mul(v, g);
      }
      return checked(std::move(values), field, n, "geometric progression");
    }

    case FamilyKind::kRandom: {
      if (spec.hi < spec.lo) fail("random range is empty");
      const std::uint64_t width =
          static_cast<std::uint64_t>(spec.hi - spec.lo) + 1;
      if (width < n) fail("random range narrower than requested size");
      // Floyd's sampling: n distinct offsets from [0, width).
      std::set<std::uint64_t> picked;
      std::uint64_t counter = 0;
      for (std::uint64_t j = width - n; j < width; ++j) {
        const std::uint64_t t = uniform_below(spec.seed, counter, j + 1);
        if (!picked.insert(t).second) picked.insert(j);
      }
      for (std::uint64_t off : picked) {
        values.push_back(field.from_integer(mpz_class(spec.lo) + mpz_class(off)));
      }
      return checked(std::move(values), field, n, "random family");
    }

    case FamilyKind::kExplicit: break;
  }
  fail("unsupported family");
}

}  // namespace detlab

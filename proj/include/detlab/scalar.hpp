#pragma once

// Exact scalars over Q or F_p, canonical encodings, and ground sets.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace detlab {

/// Arbitrary-precision nonnegative count returned by every counting engine.
using BigCount = mpz_class;

enum class FieldMode { kRationals, kPrimeField };

class FieldSpec;

/// A field element in canonical form. Rationals are kept reduced with a
/// positive denominator; prime-field residues are integers in [0, p).
/// A Scalar does not carry its field: arithmetic goes through FieldSpec.
class Scalar {
 public:
  Scalar() = default;

  const mpq_class& value() const { return v_; }
  const mpz_class& numerator() const { return v_.get_num(); }
  const mpz_class& denominator() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }

  /// "p/q", or just "p" when q = 1.
  std::string to_string() const;

  /// Sign byte followed by the length-prefixed big-endian magnitudes of the
  /// numerator and the denominator. Injective on canonical scalars.
  std::string encode() const;

  std::size_t hash() const noexcept;

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.v_ == b.v_;
  }
  friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

 private:
  friend class FieldSpec;
  explicit Scalar(mpq_class v) : v_(std::move(v)) {}

  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

struct ScalarHash {
  std::size_t operator()(const Scalar& s) const noexcept { return s.hash(); }
};

struct ScalarVectorHash {
  std::size_t operator()(const std::vector<Scalar>& v) const noexcept;
};

/// Deterministic primality test for 64-bit integers (Miller-Rabin with the
/// first twelve prime bases, which is exact below 3.3e24).
bool is_prime_u64(std::uint64_t n);

/// The ambient field: Q, or F_p for a prime p < 2^63.
class FieldSpec {
 public:
  FieldSpec() = default;

  static FieldSpec rationals() { return FieldSpec(); }
  static FieldSpec prime_field(std::uint64_t p);
  /// Accepts "rational" / "rationals" / "Q", or "fp:<p>".
  static FieldSpec parse(std::string_view text);

  FieldMode mode() const { return mode_; }
  bool is_prime_field() const { return mode_ == FieldMode::kPrimeField; }
  std::uint64_t modulus() const { return p_; }
  bool is_ordered() const { return mode_ == FieldMode::kRationals; }

  /// "rational" or "fp:<p>".
  std::string name() const;

  Scalar zero() const { return Scalar(); }
  Scalar one() const { return from_int(1); }
  Scalar from_int(long v) const;
  Scalar from_integer(const mpz_class& v) const;
  /// Maps a rational into the field; in F_p the denominator must be a unit.
  Scalar from_rational(const mpq_class& v) const;

  /// True if `s` is a canonical element of this field.
  bool contains(const Scalar& s) const;

  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
  Scalar inv(const Scalar& a) const;
  Scalar div(const Scalar& a, const Scalar& b) const;
  Scalar pow(const Scalar& a, unsigned e) const;

  /// a += b * c, in place.
  void add_mul(Scalar& acc, const Scalar& b, const Scalar& c) const;

  friend bool operator==(const FieldSpec& a, const FieldSpec& b) {
    return a.mode_ == b.mode_ && a.p_ == b.p_;
  }

 private:
  std::uint64_t reduce(const mpz_class& v) const;

  FieldMode mode_ = FieldMode::kRationals;
  std::uint64_t p_ = 0;
};

/// Parses an integer or "p/q" (rationals) or an integer reduced mod p.
Scalar parse_scalar(std::string_view text, const FieldSpec& field);

/// Finite, duplicate-free, sorted set of scalars over one field.
class GroundSet {
 public:
  const FieldSpec& field() const { return field_; }
  std::span<const Scalar> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const Scalar& operator[](std::size_t i) const { return elements_[i]; }

  bool contains(const Scalar& s) const;
  std::optional<std::size_t> index_of(const Scalar& s) const;

  friend bool operator==(const GroundSet& a, const GroundSet& b) {
    return a.field_ == b.field_ && a.elements_ == b.elements_;
  }

 private:
  friend GroundSet make_ground_set(std::span<const Scalar>, const FieldSpec&);
  GroundSet(std::vector<Scalar> elements, FieldSpec field)
      : field_(field), elements_(std::move(elements)) {}

  FieldSpec field_;
  std::vector<Scalar> elements_;
};

/// Sorts and deduplicates. Throws on empty input or foreign elements.
GroundSet make_ground_set(std::span<const Scalar> values,
                          const FieldSpec& field);

GroundSet scale_set(const GroundSet& set, const Scalar& c);
GroundSet negate_set(const GroundSet& set);

/// One scalar per line; '#' comments and blank lines are skipped.
GroundSet parse_ground_set(std::istream& in, const FieldSpec& field);
GroundSet read_ground_set(const std::filesystem::path& path,
                          const FieldSpec& field);

}  // namespace detlab

template <>
struct std::hash<detlab::Scalar> {
  std::size_t operator()(const detlab::Scalar& s) const noexcept {
    return s.hash();
  }
};

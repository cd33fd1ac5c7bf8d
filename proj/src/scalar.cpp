#include "detlab/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "detlab/error.hpp"

namespace detlab {
namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e != 0) {
    if (e & 1) r = mul_mod(r, a, m);
    a = mul_mod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t residue_of(const Scalar& s) {
  return mpz_get_ui(s.numerator().get_mpz_t());
}

void append_magnitude(std::string& out, const mpz_class& v) {
  std::size_t count = 0;
  std::string bytes((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8, '\0');
  if (sgn(v) != 0) {
    mpz_export(bytes.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  }
  bytes.resize(count);
  const auto len = static_cast<std::uint32_t>(count);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((len >> shift) & 0xff));
  }
  out += bytes;
}

std::size_t hash_mpz(const mpz_class& v, std::size_t seed) {
  const mpz_srcptr z = v.get_mpz_t();
  seed ^= static_cast<std::size_t>(mpz_sgn(z) + 2) * 0x9e3779b97f4a7c15ULL;
  const std::size_t limbs = mpz_size(z);
  for (std::size_t i = 0; i < limbs; ++i) {
    seed ^= static_cast<std::size_t>(mpz_getlimbn(z, i)) + 0x9e3779b97f4a7c15ULL +
            (seed << 6) + (seed >> 2);
  }
  return seed;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_decimal_integer(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

mpz_class parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace

std::string Scalar::to_string() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_str();
}

std::string Scalar::encode() const {
  std::string out;
  out.push_back(static_cast<char>(sign() == 0 ? 0 : (sign() > 0 ? 1 : 2)));
  append_magnitude(out, abs(v_.get_num()));
  append_magnitude(out, v_.get_den());
  return out;
}

std::size_t Scalar::hash() const noexcept {
  return hash_mpz(v_.get_den(), hash_mpz(v_.get_num(), 0x51ed270b));
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) {
  return os << s.to_string();
}

std::size_t ScalarVectorHash::operator()(
    const std::vector<Scalar>& v) const noexcept {
  std::size_t seed = v.size();
  for (const Scalar& s : v) {
    seed ^= s.hash() + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  }
  return seed;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t kBases[] = {2,  3,  5,  7,  11, 13,
                                             17, 19, 23, 29, 31, 37};
  for (std::uint64_t b : kBases) {
    if (n % b == 0) return n == b;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

FieldSpec FieldSpec::prime_field(std::uint64_t p) {
  if (p >= (std::uint64_t{1} << 63)) fail("modulus must be below 2^63");
  if (!is_prime_u64(p)) fail("modulus " + std::to_string(p) + " is not prime");
  FieldSpec f;
  f.mode_ = FieldMode::kPrimeField;
  f.p_ = p;
  return f;
}

FieldSpec FieldSpec::parse(std::string_view text) {
  text = trim(text);
  if (text == "rational" || text == "rationals" || text == "Q") {
    return rationals();
  }
  if (text == "fp" || text == "fp:") fail("prime field modulus missing");
  if (text.starts_with("fp:")) {
    const std::string_view digits = text.substr(3);
    if (!is_decimal_integer(digits) || digits.front() == '-') {
      fail("malformed modulus in field '" + std::string(text) + "'");
    }
    const mpz_class p = parse_integer(digits);
    if (!mpz_fits_ulong_p(p.get_mpz_t())) fail("modulus too large");
    return prime_field(p.get_ui());
  }
  fail("unknown field '" + std::string(text) + "'");
}

std::string FieldSpec::name() const {
  return is_prime_field() ? "fp:" + std::to_string(p_) : "rational";
}

std::uint64_t FieldSpec::reduce(const mpz_class& v) const {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), p_);
  return r.get_ui();
}

Scalar FieldSpec::from_int(long v) const {
  return from_integer(mpz_class(v));
}

Scalar FieldSpec::from_integer(const mpz_class& v) const {
  if (is_prime_field()) return Scalar(mpq_class(mpz_class(reduce(v))));
  return Scalar(mpq_class(v));
}

Scalar FieldSpec::from_rational(const mpq_class& v) const {
  mpq_class q(v);
  q.canonicalize();
  if (!is_prime_field()) return Scalar(std::move(q));
  const std::uint64_t den = reduce(q.get_den());
  if (den == 0) fail("denominator is not invertible mod " + std::to_string(p_));
  return mul(from_integer(q.get_num()),
             inv(Scalar(mpq_class(mpz_class(den)))));
}

bool FieldSpec::contains(const Scalar& s) const {
  if (!is_prime_field()) return true;
  return s.is_integer() && s.sign() >= 0 &&
         cmp(s.numerator(), mpz_class(p_)) < 0;
}

Scalar FieldSpec::add(const Scalar& a, const Scalar& b) const {
  if (is_prime_field()) {
    const std::uint64_t s = residue_of(a) + residue_of(b);
    return Scalar(mpq_class(mpz_class(s >= p_ ? s - p_ : s)));
  }
  return Scalar(mpq_class(a.v_ + b.v_));
}

Scalar FieldSpec::sub(const Scalar& a, const Scalar& b) const {
  if (is_prime_field()) {
    const std::uint64_t x = residue_of(a);
    const std::uint64_t y = residue_of(b);
    return Scalar(mpq_class(mpz_class(x >= y ? x - y : x + p_ - y)));
  }
  return Scalar(mpq_class(a.v_ - b.v_));
}

Scalar FieldSpec::mul(const Scalar& a, const Scalar& b) const {
  if (is_prime_field()) {
    return Scalar(mpq_class(mpz_class(mul_mod(residue_of(a), residue_of(b), p_))));
  }
  return Scalar(mpq_class(a.v_ * b.v_));
}

Scalar FieldSpec::neg(const Scalar& a) const {
  if (is_prime_field()) {
    const std::uint64_t x = residue_of(a);
    return Scalar(mpq_class(mpz_class(x == 0 ? 0 : p_ - x)));
  }
  return Scalar(mpq_class(-a.v_));
}

Scalar FieldSpec::inv(const Scalar& a) const {
  if (a.is_zero()) fail("division by zero");
  if (is_prime_field()) {
    return Scalar(mpq_class(mpz_class(pow_mod(residue_of(a), p_ - 2, p_))));
  }
  return Scalar(mpq_class(1 / a.v_));
}

Scalar FieldSpec::div(const Scalar& a, const Scalar& b) const {
  if (b.is_zero()) fail("division by zero");
  if (is_prime_field()) return mul(a, inv(b));
  return Scalar(mpq_class(a.v_ / b.v_));
}

Scalar FieldSpec::pow(const Scalar& a, unsigned e) const {
  Scalar r = one();
  Scalar base = a;
  while (e != 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

void FieldSpec::add_mul(Scalar& acc, const Scalar& b, const Scalar& c) const {
  if (is_prime_field()) {
    const std::uint64_t t = mul_mod(residue_of(b), residue_of(c), p_);
    const std::uint64_t s = residue_of(acc) + t;
    acc.v_ = mpz_class(s >= p_ ? s - p_ : s);
    return;
  }
  acc.v_ += b.v_ * c.v_;
}

Scalar parse_scalar(std::string_view text, const FieldSpec& field) {
  const std::string_view t = trim(text);
  const std::size_t slash = t.find('/');
  if (slash == std::string_view::npos) {
    if (!is_decimal_integer(t)) fail("malformed scalar '" + std::string(text) + "'");
    return field.from_integer(parse_integer(t));
  }
  if (field.is_prime_field()) {
    fail("prime-field scalars must be integers: '" + std::string(text) + "'");
  }
  const std::string_view num = trim(t.substr(0, slash));
  const std::string_view den = trim(t.substr(slash + 1));
  if (!is_decimal_integer(num) || !is_decimal_integer(den)) {
    fail("malformed scalar '" + std::string(text) + "'");
  }
  const mpz_class q = parse_integer(den);
  if (sgn(q) == 0) fail("zero denominator in '" + std::string(text) + "'");
  return field.from_rational(mpq_class(parse_integer(num), q));
}

bool GroundSet::contains(const Scalar& s) const {
  return std::binary_search(elements_.begin(), elements_.end(), s);
}

std::optional<std::size_t> GroundSet::index_of(const Scalar& s) const {
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), s);
  if (it == elements_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - elements_.begin());
}

GroundSet make_ground_set(std::span<const Scalar> values,
                          const FieldSpec& field) {
  if (values.empty()) fail("empty ground set");
  std::vector<Scalar> elements(values.begin(), values.end());
  for (const Scalar& s : elements) {
    if (!field.contains(s)) {
      fail("value " + s.to_string() + " is not an element of " + field.name());
    }
  }
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  return GroundSet(std::move(elements), field);
}

GroundSet scale_set(const GroundSet& set, const Scalar& c) {
  if (c.is_zero()) fail("scale factor must be nonzero");
  const FieldSpec& f = set.field();
  std::vector<Scalar> out;
  out.reserve(set.size());
  for (const Scalar& x : set.elements()) out.push_back(f.mul(c, x));
  return make_ground_set(out, f);
}

GroundSet negate_set(const GroundSet& set) {
  return scale_set(set, set.field().from_int(-1));
}

GroundSet parse_ground_set(std::istream& in, const FieldSpec& field) {
  std::vector<Scalar> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      values.push_back(parse_scalar(t, field));
    } catch (const Error& e) {
      fail("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return make_ground_set(values, field);
}

GroundSet read_ground_set(const std::filesystem::path& path,
                          const FieldSpec& field) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open ground-set file " + path.string());
  return parse_ground_set(in, field);
}

}  // namespace detlab

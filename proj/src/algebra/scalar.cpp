#include "cipherflow/algebra/scalar.hpp"

#include <cstring>

#include "cipherflow/error.hpp"

namespace cipherflow::algebra {

Scalar Scalar::from_u64(std::uint64_t v) {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar s;
  blst_fr_from_uint64(&s.v_, limbs);
  return s;
}

Scalar Scalar::from_i64(std::int64_t v) {
  if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
  return -from_u64(static_cast<std::uint64_t>(-(v + 1)) + 1);
}

Scalar Scalar::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kBytes) throw DecodeError("scalar must be 32 bytes");
  blst_scalar raw;
  blst_scalar_from_lendian(&raw, bytes.data());
  if (!blst_scalar_fr_check(&raw)) {
    // fr_check rejects zero as well; zero is a legitimate scalar.
    bool zero = true;
    for (auto b : bytes) zero = zero && b == 0;
    if (!zero) throw DecodeError("scalar not reduced modulo group order");
    return Scalar{};
  }
  Scalar s;
  blst_fr_from_scalar(&s.v_, &raw);
  return s;
}

Scalar Scalar::random(Rng& rng) {
  std::array<std::uint8_t, 64> wide{};
  rng.fill(wide);
  blst_scalar raw;
  blst_scalar_from_le_bytes(&raw, wide.data(), wide.size());
  Scalar s;
  blst_fr_from_scalar(&s.v_, &raw);
  return s;
}

Scalar Scalar::random_nonzero(Rng& rng) {
  for (;;) {
    auto s = random(rng);
    if (!s.is_zero()) return s;
  }
}

blst_scalar Scalar::to_blst() const {
  blst_scalar raw;
  blst_scalar_from_fr(&raw, &v_);
  return raw;
}

std::array<std::uint8_t, Scalar::kBytes> Scalar::to_bytes() const {
  auto raw = to_blst();
  std::array<std::uint8_t, kBytes> out{};
  blst_lendian_from_scalar(out.data(), &raw);
  return out;
}

std::uint64_t Scalar::low_u64() const {
  auto b = to_bytes();
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::string Scalar::to_hex() const {
  static const char* digits = "0123456789abcdef";
  auto b = to_bytes();
  std::string out;
  for (int i = kBytes - 1; i >= 0; --i) {
    out.push_back(digits[b[i] >> 4]);
    out.push_back(digits[b[i] & 15]);
  }
  return out;
}

bool Scalar::is_zero() const {
  static const blst_fr zero{};
  return std::memcmp(&v_, &zero, sizeof(v_)) == 0;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw KeyError("zero scalar has no inverse");
  Scalar s;
  blst_fr_inverse(&s.v_, &v_);
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar s;
  blst_fr_add(&s.v_, &v_, &o.v_);
  return s;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar s;
  blst_fr_sub(&s.v_, &v_, &o.v_);
  return s;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar s;
  blst_fr_mul(&s.v_, &v_, &o.v_);
  return s;
}

Scalar Scalar::operator-() const { return Scalar{} - *this; }

bool Scalar::operator==(const Scalar& o) const { return std::memcmp(&v_, &o.v_, sizeof(v_)) == 0; }

std::array<std::uint8_t, 32> group_order_be() {
  // r = 0x73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001
  return {0x73, 0xed, 0xa7, 0x53, 0x29, 0x9d, 0x7d, 0x48, 0x33, 0x39, 0xd8, 0x08, 0x09, 0xa1, 0xd8, 0x05,
          0x53, 0xbd, 0xa4, 0x02, 0xff, 0xfe, 0x5b, 0xfe, 0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x01};
}

}  // namespace cipherflow::algebra

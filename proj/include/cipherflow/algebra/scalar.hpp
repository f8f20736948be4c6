#pragma once

#include <blst.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "cipherflow/algebra/rng.hpp"

namespace cipherflow::algebra {

// Element of Z_p, p the prime order of the pairing groups. Stored in
// Montgomery form; always reduced.
class Scalar {
 public:
  static constexpr std::size_t kBytes = 32;

  Scalar() : v_{} {}

  static Scalar from_u64(std::uint64_t v);
  static Scalar from_i64(std::int64_t v);
  // Canonical little-endian; rejects values >= p.
  static Scalar from_bytes(std::span<const std::uint8_t> bytes);
  // Uniform in [0, p).
  static Scalar random(Rng& rng);
  static Scalar random_nonzero(Rng& rng);

  std::array<std::uint8_t, kBytes> to_bytes() const;
  // Little-endian canonical integer, as blst expects for multiplication.
  blst_scalar to_blst() const;
  std::uint64_t low_u64() const;
  std::string to_hex() const;

  bool is_zero() const;
  // Throws KeyError when zero.
  Scalar inverse() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const { return *this * o.inverse(); }
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }

 private:
  blst_fr v_;
};

// Big-endian bytes of the group order p.
std::array<std::uint8_t, 32> group_order_be();

}  // namespace cipherflow::algebra

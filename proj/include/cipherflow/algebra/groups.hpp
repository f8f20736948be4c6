#pragma once

#include <blst.h>

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "cipherflow/algebra/scalar.hpp"

namespace cipherflow::algebra {

// The two pairing source groups and the target group of BLS12-381, all
// written multiplicatively to match the scheme algebra.

class G1 {
 public:
  static constexpr std::size_t kBytes = 48;

  G1();  // identity
  static G1 generator();

  G1 operator*(const G1& o) const;
  G1 inverse() const;
  G1 pow(const Scalar& e) const;
  bool is_identity() const;
  bool operator==(const G1& o) const;
  bool operator!=(const G1& o) const { return !(*this == o); }

  std::array<std::uint8_t, kBytes> to_bytes() const;
  // Validates curve membership and subgroup.
  static G1 from_bytes(std::span<const std::uint8_t> bytes);

  const blst_p1& raw() const { return p_; }
  blst_p1_affine affine() const;

 private:
  blst_p1 p_;
};

class G2 {
 public:
  static constexpr std::size_t kBytes = 96;

  G2();
  static G2 generator();

  G2 operator*(const G2& o) const;
  G2 inverse() const;
  G2 pow(const Scalar& e) const;
  bool is_identity() const;
  bool operator==(const G2& o) const;
  bool operator!=(const G2& o) const { return !(*this == o); }

  std::array<std::uint8_t, kBytes> to_bytes() const;
  static G2 from_bytes(std::span<const std::uint8_t> bytes);

  const blst_p2& raw() const { return p_; }
  blst_p2_affine affine() const;

 private:
  blst_p2 p_;
};

class Gt {
 public:
  // Twelve big-endian base-field coordinates.
  static constexpr std::size_t kBytes = 576;

  Gt();  // identity
  explicit Gt(const blst_fp12& v) : v_(v) {}

  Gt operator*(const Gt& o) const;
  Gt operator/(const Gt& o) const { return *this * o.inverse(); }
  Gt& operator*=(const Gt& o) { return *this = *this * o; }
  // Unitary inverse; valid for every element of the target group.
  Gt inverse() const;
  Gt pow(const Scalar& e) const;
  Gt pow_u64(std::uint64_t e) const;
  Gt square() const;
  bool is_identity() const;
  bool operator==(const Gt& o) const;
  bool operator!=(const Gt& o) const { return !(*this == o); }

  std::array<std::uint8_t, kBytes> to_bytes() const;
  // Validates target-group membership.
  static Gt from_bytes(std::span<const std::uint8_t> bytes);
  // 64-bit fingerprint of the canonical encoding (dlog table key).
  std::uint64_t fingerprint() const;

  const blst_fp12& raw() const { return v_; }

 private:
  blst_fp12 v_;
};

// e: G1 x G2 -> Gt.
Gt pairing(const G1& p, const G2& q);
// Product of pairings with a single final exponentiation.
Gt multi_pairing(std::span<const std::pair<G1, G2>> terms);

}  // namespace cipherflow::algebra

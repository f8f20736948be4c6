#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "cipherflow/algebra/groups.hpp"

namespace cipherflow::algebra {

// Precomputed powers base^(d * 256^w) for fast fixed-base exponentiation
// in the target group (32 table lookups and multiplications per call).
class FixedBaseGt {
 public:
  explicit FixedBaseGt(const Gt& base);

  Gt pow(const Scalar& e) const;
  const Gt& base() const { return base_; }

 private:
  Gt base_;
  std::vector<Gt> table_;  // 32 windows x 256 digits
};

// Pairing parameters shared by every scheme. BLS12-381 is asymmetric, so
// the symmetric e(g, g) of the constructions is realised as e(g1, g2):
// elements that are paired live in G1 on one side and G2 on the other.
class BilinearContext {
 public:
  // Only 128-bit security (BLS12-381) is supported. Throws Error otherwise.
  static std::shared_ptr<const BilinearContext> setup(int security_bits = 128);

  int security_bits() const { return 128; }
  std::array<std::uint8_t, 32> order_be() const { return group_order_be(); }
  std::size_t order_bits() const { return 255; }

  const G1& g1() const { return g1_; }
  const G2& g2() const { return g2_; }
  // e(g1, g2), the generator of the target group.
  const Gt& gt() const { return gt_.base(); }
  // gt^e through the fixed-base table.
  Gt gt_pow(const Scalar& e) const { return gt_.pow(e); }
  Gt gt_pow(std::uint64_t e) const { return gt_.pow(Scalar::from_u64(e)); }

  BilinearContext(const BilinearContext&) = delete;
  BilinearContext& operator=(const BilinearContext&) = delete;

 private:
  BilinearContext();

  G1 g1_;
  G2 g2_;
  FixedBaseGt gt_;
};

using ContextPtr = std::shared_ptr<const BilinearContext>;

}  // namespace cipherflow::algebra

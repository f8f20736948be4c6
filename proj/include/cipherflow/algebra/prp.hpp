#pragma once

#include <array>
#include <cstdint>

#include "cipherflow/algebra/scalar.hpp"

namespace cipherflow::algebra {

// Keyed pseudorandom permutation of [0, domain) for small domains
// (domain <= 2^32): a 4-round balanced Feistel network over the smallest
// even bit width covering the domain, with cycle walking back into range.
// Round function is keyed BLAKE2b.
class SmallDomainPrp {
 public:
  static constexpr std::uint64_t kMaxDomain = std::uint64_t{1} << 32;

  // Throws DomainError when domain is 0 or exceeds kMaxDomain.
  SmallDomainPrp(const Scalar& key, std::uint64_t domain);

  std::uint64_t apply(std::uint64_t m) const;
  std::uint64_t invert(std::uint64_t c) const;
  std::uint64_t domain() const { return domain_; }

 private:
  std::uint64_t round_fn(int round, std::uint64_t half) const;
  std::uint64_t forward(std::uint64_t x) const;
  std::uint64_t backward(std::uint64_t x) const;

  std::array<std::uint8_t, 32> key_;
  std::uint64_t domain_;
  unsigned half_bits_;
};

std::uint64_t prp_apply(const Scalar& key, std::uint64_t m, std::uint64_t domain);
std::uint64_t prp_invert(const Scalar& key, std::uint64_t c, std::uint64_t domain);

}  // namespace cipherflow::algebra

#include "cipherflow/algebra/prp.hpp"

#include <sodium.h>

#include <bit>

#include "cipherflow/error.hpp"

namespace cipherflow::algebra {
namespace {

constexpr int kRounds = 4;

}  // namespace

SmallDomainPrp::SmallDomainPrp(const Scalar& key, std::uint64_t domain) : key_(key.to_bytes()), domain_(domain) {
  if (domain == 0 || domain > kMaxDomain) throw DomainError("PRP domain must be in [1, 2^32]");
  unsigned bits = domain > 1 ? static_cast<unsigned>(std::bit_width(domain - 1)) : 1;
  if (bits < 2) bits = 2;
  if (bits % 2) ++bits;
  half_bits_ = bits / 2;
}

std::uint64_t SmallDomainPrp::round_fn(int round, std::uint64_t half) const {
  std::array<std::uint8_t, 13> msg{};
  msg[0] = static_cast<std::uint8_t>(round);
  for (int i = 0; i < 8; ++i) msg[1 + i] = static_cast<std::uint8_t>(domain_ >> (8 * i));
  for (int i = 0; i < 4; ++i) msg[9 + i] = static_cast<std::uint8_t>(half >> (8 * i));
  std::array<std::uint8_t, 8> out{};
  crypto_generichash(out.data(), out.size(), msg.data(), msg.size(), key_.data(), key_.size());
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(out[i]) << (8 * i);
  return v & ((std::uint64_t{1} << half_bits_) - 1);
}

std::uint64_t SmallDomainPrp::forward(std::uint64_t x) const {
  const std::uint64_t mask = (std::uint64_t{1} << half_bits_) - 1;
  std::uint64_t left = x >> half_bits_, right = x & mask;
  for (int r = 0; r < kRounds; ++r) {
    const std::uint64_t next = left ^ round_fn(r, right);
    left = right;
    right = next;
  }
  return (left << half_bits_) | right;
}

std::uint64_t SmallDomainPrp::backward(std::uint64_t x) const {
  const std::uint64_t mask = (std::uint64_t{1} << half_bits_) - 1;
  std::uint64_t left = x >> half_bits_, right = x & mask;
  for (int r = kRounds - 1; r >= 0; --r) {
    const std::uint64_t prev = right ^ round_fn(r, left);
    right = left;
    left = prev;
  }
  return (left << half_bits_) | right;
}

std::uint64_t SmallDomainPrp::apply(std::uint64_t m) const {
  if (m >= domain_) throw DomainError("PRP input " + std::to_string(m) + " outside domain");
  std::uint64_t x = m;
  do x = forward(x);
  while (x >= domain_);
  return x;
}

std::uint64_t SmallDomainPrp::invert(std::uint64_t c) const {
  if (c >= domain_) throw DomainError("PRP input " + std::to_string(c) + " outside domain");
  std::uint64_t x = c;
  do x = backward(x);
  while (x >= domain_);
  return x;
}

std::uint64_t prp_apply(const Scalar& key, std::uint64_t m, std::uint64_t domain) {
  return SmallDomainPrp(key, domain).apply(m);
}

std::uint64_t prp_invert(const Scalar& key, std::uint64_t c, std::uint64_t domain) {
  return SmallDomainPrp(key, domain).invert(c);
}

}  // namespace cipherflow::algebra

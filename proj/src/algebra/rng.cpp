#include "cipherflow/algebra/rng.hpp"

#include <sodium.h>

#include <stdexcept>

namespace cipherflow::algebra {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

Rng Rng::system() {
  ensure_sodium();
  return Rng{};
}

Rng Rng::seeded(std::uint64_t seed) {
  ensure_sodium();
  Rng rng;
  rng.deterministic_ = true;
  for (int i = 0; i < 8; ++i) rng.key_[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  return rng;
}

void Rng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (!deterministic_) {
    randombytes_buf(out.data(), out.size());
    return;
  }
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
  for (int i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(nonce_ >> (8 * i));
  ++nonce_;
  crypto_stream_chacha20(out.data(), out.size(), nonce.data(), key_.data());
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: zero bound");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    auto v = next_u64();
    if (v < limit) return v % bound;
  }
}

}  // namespace cipherflow::algebra

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace cipherflow::algebra {

// Randomness source. `system()` draws from the OS CSPRNG; `seeded()` is a
// ChaCha20 keystream for reproducible tests and benchmarks. Not thread-safe:
// every caller owns its own instance.
class Rng {
 public:
  static Rng system();
  static Rng seeded(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  // Uniform in [0, bound). bound > 0.
  std::uint64_t uniform(std::uint64_t bound);

 private:
  Rng() = default;

  bool deterministic_ = false;
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t nonce_ = 0;
};

}  // namespace cipherflow::algebra

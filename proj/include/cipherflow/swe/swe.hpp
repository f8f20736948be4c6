#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cipherflow/algebra/context.hpp"
#include "cipherflow/algebra/dlog.hpp"
#include "cipherflow/codec.hpp"

namespace cipherflow::swe {

using algebra::Gt;
using algebra::Scalar;

enum class Construction : std::uint8_t { masked = 1, auxiliary = 2, cumulative = 3 };

// ElGamal over the target group; the auxiliary scheme of constructions 2
// and 3. Encrypts group elements.
struct ElGamalCiphertext {
  Gt c1;  // gt^k
  Gt c2;  // m * pk^k
};
ElGamalCiphertext elgamal_enc(const algebra::BilinearContext& ctx, const Gt& pk, const Gt& m, algebra::Rng& rng);
Gt elgamal_dec(const Scalar& sk, const ElGamalCiphertext& ct);

struct WindowKey {
  std::uint32_t ws = 0;
  Scalar secret;  // construction 1: target mask sum; 2/3: ElGamal secret
  Gt pub;         // 2/3 only: gt^secret
};

struct WindowKeySet {
  Construction construction = Construction::masked;
  Scalar s_star;  // construction 3 public offset of the cumulative mask
  std::map<std::uint32_t, WindowKey> keys;

  const WindowKey& at(std::uint32_t ws) const;  // throws KeyError
  std::vector<std::uint32_t> windows() const;
  // The subset a user authorised for ws needs (one key plus public data).
  WindowKeySet restrict_to(std::uint32_t ws) const;

  Bytes to_bytes() const;
  static WindowKeySet from_bytes(std::span<const std::uint8_t> bytes);
};

// Throws DomainError on an empty set or ws == 0.
WindowKeySet swe_gen(const algebra::BilinearContext& ctx, const std::vector<std::uint32_t>& windows, Construction c,
                     algebra::Rng& rng);

enum class ComponentKind : std::uint8_t { mask = 0, auxsum = 1, cumulative = 2 };

// One framed element. Construction 3's shared masked stream uses ws = 0.
struct Component {
  std::uint16_t ws = 0;
  ComponentKind kind = ComponentKind::mask;
  Gt masked;                 // mask
  ElGamalCiphertext sealed;  // auxsum, cumulative

  void write(ByteWriter& w) const;
  static Component read(ByteReader& r);
};

// Per-tuple component lists, in stream order.
struct SweCiphertext {
  Construction construction = Construction::masked;
  std::vector<std::vector<Component>> tuples;

  std::size_t component_count(ComponentKind kind) const;
};

// Masks for one window size whose sum over every tumbling window is a
// fixed target: all but the last position of a window are uniform, the last
// closes the sum.
class ClosingMaskStream {
 public:
  ClosingMaskStream(std::uint32_t ws, const Scalar& target) : ws_(ws), target_(target) {}
  Scalar next(algebra::Rng& rng);

 private:
  std::uint32_t ws_;
  Scalar target_;
  Scalar running_;
  std::uint32_t pos_ = 0;
};

// Incremental owner side. Values must be below `value_bound`.
class SweEncryptor {
 public:
  SweEncryptor(algebra::ContextPtr ctx, WindowKeySet keys, std::uint64_t value_bound = 256);

  std::vector<Component> push(std::uint64_t m, algebra::Rng& rng);
  std::uint64_t position() const { return pos_; }

 private:
  algebra::ContextPtr ctx_;
  WindowKeySet keys_;
  std::uint64_t bound_;
  std::uint64_t pos_ = 0;
  std::map<std::uint32_t, ClosingMaskStream> masks_;  // construction 1
  std::map<std::uint32_t, std::uint64_t> sums_;       // construction 2
  Scalar cumulative_;                                 // construction 3: s* + sum of r
};

SweCiphertext swe_enc(algebra::ContextPtr ctx, std::span<const std::uint64_t> m, const WindowKeySet& keys,
                      algebra::Rng& rng, std::uint64_t value_bound = 256);

// Incremental user side for one window size. Emits a sum when a window
// completes; trailing partial windows produce nothing. Throws NotInTable
// when the recovered element is outside the sum table (wrong key).
class SweDecryptor {
 public:
  SweDecryptor(algebra::ContextPtr ctx, Construction c, const WindowKeySet& keys, std::uint32_t ws,
               std::uint64_t max_sum = 1 << 16);

  std::optional<std::uint64_t> push(std::span<const Component> tuple);

 private:
  algebra::ContextPtr ctx_;
  Construction construction_;
  std::uint32_t ws_;
  WindowKey key_;
  std::shared_ptr<const algebra::DLogTable<Gt>> table_;
  std::uint64_t pos_ = 0;
  Gt product_;
  Gt previous_cumulative_;
};

std::vector<std::uint64_t> swe_dec(algebra::ContextPtr ctx, std::uint32_t ws, const SweCiphertext& ct,
                                   const WindowKeySet& keys, std::uint64_t max_sum = 1 << 16);

}  // namespace cipherflow::swe

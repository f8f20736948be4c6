#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>

#include "cipherflow/algebra/context.hpp"
#include "cipherflow/algebra/dlog.hpp"
#include "cipherflow/codec.hpp"

namespace cipherflow::det {

using algebra::G1;
using algebra::Scalar;

// Secret key of the deterministic scheme: k1 keys the permutation, k2 is
// the (invertible) exponent.
struct DetKey {
  Scalar k1;
  Scalar k2;

  Bytes to_bytes() const;
  static DetKey from_bytes(std::span<const std::uint8_t> bytes);
  bool operator==(const DetKey&) const = default;
};

// g1^(pi_k1(m) * k2): one compressed G1 element on the wire.
struct DetCiphertext {
  G1 element;

  std::array<std::uint8_t, G1::kBytes> to_bytes() const { return element.to_bytes(); }
  static DetCiphertext from_bytes(std::span<const std::uint8_t> bytes) { return {G1::from_bytes(bytes)}; }
  bool operator==(const DetCiphertext& o) const { return element == o.element; }
};

constexpr std::uint64_t kDefaultMessageDomain = std::uint64_t{1} << 16;

DetKey det_gen(algebra::Rng& rng);
// Two owners that want joinable ciphertexts share k1 and keep private k2.
DetKey det_gen_with_prp_key(const Scalar& shared_k1, algebra::Rng& rng);

class DetCipher {
 public:
  explicit DetCipher(algebra::ContextPtr ctx, std::uint64_t message_domain = kDefaultMessageDomain);

  // Throws DomainError if m >= message domain.
  DetCiphertext encrypt(std::uint64_t m, const DetKey& key) const;
  // Throws NotInTable when ct was not produced under key (or is out of domain).
  std::uint64_t decrypt(const DetCiphertext& ct, const DetKey& key) const;

  std::uint64_t message_domain() const { return domain_; }

 private:
  const algebra::DLogTable<G1>& table() const;

  algebra::ContextPtr ctx_;
  std::uint64_t domain_;
  mutable std::shared_ptr<const algebra::DLogTable<G1>> table_;
  mutable std::once_flag table_once_;
};

// Session token letting the cloud test equality of join values across two
// streams: z_i = s / k_{i,2} for a fresh s.
struct JoinToken {
  Scalar z1;
  Scalar z2;

  Bytes to_bytes() const;
  static JoinToken from_bytes(std::span<const std::uint8_t> bytes);
};

JoinToken make_join_token(const Scalar& k1_2, const Scalar& k2_2, algebra::Rng& rng);

// V^z, the value compared across streams.
G1 blind_for_match(const DetCiphertext& ct, const Scalar& z);
inline bool join_match(const DetCiphertext& v1, const DetCiphertext& v2, const JoinToken& token) {
  return blind_for_match(v1, token.z1) == blind_for_match(v2, token.z2);
}

}  // namespace cipherflow::det

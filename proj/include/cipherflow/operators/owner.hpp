#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cipherflow/abe/proxy_abe.hpp"
#include "cipherflow/det/det_cipher.hpp"
#include "cipherflow/operators/types.hpp"
#include "cipherflow/swe/swe.hpp"

namespace cipherflow::ops {

// Everything a stream owner holds. Never leaves the owner process except as
// an owner-role bundle on the owner's disk.
struct OwnerKeys {
  StreamConfig config;
  abe::PublicKey pk;
  abe::MasterKey mk;
  det::DetKey det;
  // Agg-1 closing-mask targets SK_{A,ws}.
  std::map<std::string, std::map<std::uint32_t, Scalar>> agg1_secrets;
};

// Validates the config, draws the Agg-3 offsets into it and generates all
// key material. `shared_k1` is the join PRP key agreed with another owner.
OwnerKeys owner_setup(algebra::ContextPtr ctx, StreamConfig config, algebra::Rng& rng,
                      std::optional<Scalar> shared_k1 = std::nullopt);

// Incremental tuple encryption for one stream. Enforces the schema, value
// domains and timestamp order (contiguous from 0 when window encodings are
// on).
class StreamEncryptor {
 public:
  StreamEncryptor(algebra::ContextPtr ctx, const OwnerKeys& keys);

  SecureTuple encrypt(const DataTuple& t, algebra::Rng& rng);

 private:
  void check(const DataTuple& t) const;
  abe::AbeCiphertext enc_value(const Scalar& exponent, const std::vector<std::string>& attrs, algebra::Rng& rng) const;

  algebra::ContextPtr ctx_;
  const OwnerKeys& keys_;
  det::DetCipher det_;
  std::optional<std::uint64_t> last_ts_;
  std::map<std::pair<std::string, std::uint32_t>, swe::ClosingMaskStream> agg1_masks_;
  std::map<std::pair<std::string, std::uint32_t>, std::uint64_t> agg2_sums_;
  std::map<std::string, Scalar> agg3_cumulative_;  // s* + sum of r so far
};

// ---- key issuance ----

// The access tree a policy's key embeds for one side (0 or 1).
abe::AccessTree policy_tree(const OperatorPolicy& p, const StreamConfig& s, int side);

enum class BundleRole : std::uint8_t { cloud = 0, user = 1, owner = 2 };

// Cloud material: the policy and one transform key per side.
struct CloudBundle {
  OperatorPolicy policy;
  std::vector<abe::TransformKey> keys;

  Bytes to_bytes() const;
  // Throws KeyError when the bytes carry any role other than cloud.
  static CloudBundle from_bytes(std::span<const std::uint8_t> bytes);
};

// User material: blinding secrets, join exponents, Agg-1 mask targets and
// the public stream descriptions needed to decode outputs.
struct UserBundle {
  OperatorPolicy policy;
  std::vector<Scalar> z;              // per side
  std::vector<Scalar> join_k2;        // per side, join kinds
  std::optional<Scalar> agg1_secret;  // Agg-1 with ws > 1
  std::vector<StreamConfig> streams;  // per side

  Bytes to_bytes() const;
  static UserBundle from_bytes(std::span<const std::uint8_t> bytes);  // throws KeyError on other roles
};

struct IssuedKeys {
  CloudBundle cloud;
  UserBundle user;
};

// Negotiation: validates the policy against the owners' streams and
// generates the split key material. `o2` is required for join kinds.
IssuedKeys issue_policy(const OperatorPolicy& p, const OwnerKeys& o1, const OwnerKeys* o2, algebra::Rng& rng);

Bytes owner_keys_to_bytes(const OwnerKeys& keys);
OwnerKeys owner_keys_from_bytes(algebra::ContextPtr ctx, std::span<const std::uint8_t> bytes);

// Role byte of a bundle without decoding the rest. Throws DecodeError.
BundleRole bundle_role(std::span<const std::uint8_t> bytes);

}  // namespace cipherflow::ops

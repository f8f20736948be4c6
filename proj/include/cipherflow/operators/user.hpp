#pragma once

#include <vector>

#include "cipherflow/det/det_cipher.hpp"
#include "cipherflow/operators/owner.hpp"
#include "cipherflow/operators/types.hpp"

namespace cipherflow::ops {

// Discrete log of gt^x for x < bound: baby table of min(bound, 2^16)
// entries, then giant steps. Throws NotInTable.
std::uint64_t bounded_dlog(const algebra::BilinearContext& ctx, const Gt& elem, std::uint64_t bound);

// Final decryption for one policy. Output record layouts:
//   map, map-filter      ts, B...
//   filter               ts, schema attributes
//   join                 ts1, ts2, l.<attr>..., r.<attr>...
//   map-filter-join      ts1, ts2, l.<B>..., r.<B>...
//   aggregates           start, end, sum, count
class UserDecryptor {
 public:
  UserDecryptor(algebra::ContextPtr ctx, UserBundle keys);

  // Throws KeyError / NotInTable when the record was not produced for this
  // user's key, ProtocolError on a record of another policy.
  PlainRecord decrypt(const OutputRecord& rec) const;

  // Fresh session token for the cloud (join kinds only).
  det::JoinToken join_token(algebra::Rng& rng) const;

  const UserBundle& keys() const { return keys_; }

 private:
  std::uint64_t value(const abe::TransformedCiphertext& t, int side, std::uint64_t bound) const;
  std::uint64_t value_bound(const std::string& attr, int side) const;

  algebra::ContextPtr ctx_;
  UserBundle keys_;
};

}  // namespace cipherflow::ops

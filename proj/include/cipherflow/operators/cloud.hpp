#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cipherflow/det/det_cipher.hpp"
#include "cipherflow/operators/owner.hpp"
#include "cipherflow/operators/types.hpp"

namespace cipherflow::ops {

// Cloud-side state machine of one registered policy. Holds transform keys
// only. Not thread-safe: the caller serialises calls per query.
class ContinuousQuery {
 public:
  virtual ~ContinuousQuery() = default;

  const OperatorPolicy& policy() const { return policy_; }
  // side 0 is `stream`, side 1 is `stream2` (join kinds).
  virtual std::vector<OutputRecord> on_tuple(int side, const SecureTuple& st) = 0;
  // Join kinds only; throws ProtocolError otherwise. Tuples buffered before
  // the token arrives become matchable once it is set.
  virtual void set_join_token(const det::JoinToken& token);

 protected:
  explicit ContinuousQuery(OperatorPolicy p) : policy_(std::move(p)) {}

  OperatorPolicy policy_;
};

// Throws PolicyError when the bundle does not fit the registered streams.
std::unique_ptr<ContinuousQuery> make_query(algebra::ContextPtr ctx, const CloudBundle& bundle,
                                            const StreamConfig& s1, const StreamConfig* s2);

}  // namespace cipherflow::ops

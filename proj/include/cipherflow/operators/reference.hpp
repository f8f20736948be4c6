#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "cipherflow/operators/types.hpp"

namespace cipherflow::ops {

// Plaintext evaluation of an operator policy with the same windowing,
// buffering and record layout as the secure pipeline (see UserDecryptor).
class ReferenceQuery {
 public:
  ReferenceQuery(OperatorPolicy p, StreamConfig s1, std::optional<StreamConfig> s2 = std::nullopt);

  std::vector<PlainRecord> on_tuple(int side, const DataTuple& t);

  const OperatorPolicy& policy() const { return policy_; }

 private:
  bool passes(int side, const DataTuple& t) const;
  std::vector<PlainRecord> join(int side, const DataTuple& t);
  std::vector<PlainRecord> aggregate(const DataTuple& t);

  OperatorPolicy policy_;
  StreamConfig s1_;
  std::optional<StreamConfig> s2_;
  std::deque<DataTuple> buffers_[2];
  // Aggregate window state.
  std::uint64_t sum_ = 0;
  std::uint32_t count_ = 0;
  std::uint64_t next_ = 0;
};

}  // namespace cipherflow::ops

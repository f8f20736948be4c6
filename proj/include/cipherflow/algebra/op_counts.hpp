#pragma once

#include <cstdint>

namespace cipherflow::algebra {

// Per-thread instrumentation of expensive group operations. Deterministic
// and machine independent, so tests assert on these rather than on timings.
struct OpCounts {
  std::uint64_t pairings = 0;    // Miller loops
  std::uint64_t final_exps = 0;
  std::uint64_t gt_exps = 0;     // variable- and fixed-base Gt exponentiations
  std::uint64_t g1_exps = 0;
  std::uint64_t g2_exps = 0;
  std::uint64_t gt_muls = 0;     // Gt multiplications/divisions done on ciphertexts
  std::uint64_t transforms = 0;  // successful proxy-ABE transforms
  std::uint64_t dlogs = 0;

  OpCounts operator-(const OpCounts& o) const;
};

OpCounts& thread_op_counts();

// Snapshot of the calling thread's counters; `delta()` reports the
// operations performed since construction.
class OpCounter {
 public:
  OpCounter() : start_(thread_op_counts()) {}
  OpCounts delta() const { return thread_op_counts() - start_; }

 private:
  OpCounts start_;
};

}  // namespace cipherflow::algebra

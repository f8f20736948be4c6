#include "cipherflow/algebra/op_counts.hpp"

namespace cipherflow::algebra {

OpCounts OpCounts::operator-(const OpCounts& o) const {
  OpCounts d;
  d.pairings = pairings - o.pairings;
  d.final_exps = final_exps - o.final_exps;
  d.gt_exps = gt_exps - o.gt_exps;
  d.g1_exps = g1_exps - o.g1_exps;
  d.g2_exps = g2_exps - o.g2_exps;
  d.gt_muls = gt_muls - o.gt_muls;
  d.transforms = transforms - o.transforms;
  d.dlogs = dlogs - o.dlogs;
  return d;
}

OpCounts& thread_op_counts() {
  thread_local OpCounts counts;
  return counts;
}

}  // namespace cipherflow::algebra

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cipherflow/algebra/groups.hpp"

namespace cipherflow::algebra {

std::uint64_t fingerprint(const G1& p);
inline std::uint64_t fingerprint(const Gt& v) { return v.fingerprint(); }

// Baby-table discrete logarithm over [0, max_exponent): maps the 64-bit
// fingerprint of base^x to x. Immutable after construction.
template <class Group>
class DLogTable {
 public:
  DLogTable(const Group& base, std::uint64_t max_exponent);

  // Throws NotInTable when elem is not base^x for x < max_exponent.
  std::uint64_t lookup(const Group& elem) const;
  std::optional<std::uint64_t> find(const Group& elem) const;

  const Group& base() const { return base_; }
  std::uint64_t max_exponent() const { return max_; }

 private:
  Group base_;
  std::uint64_t max_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> entries_;  // sorted by fingerprint
};

extern template class DLogTable<G1>;
extern template class DLogTable<Gt>;

// Process-wide cache so every decryptor in a process shares one table per
// (base, bound).
std::shared_ptr<const DLogTable<Gt>> shared_gt_dlog(const Gt& base, std::uint64_t max_exponent);

}  // namespace cipherflow::algebra

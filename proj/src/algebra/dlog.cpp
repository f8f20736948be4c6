#include "cipherflow/algebra/dlog.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/error.hpp"

namespace cipherflow::algebra {
namespace {

std::uint64_t fold(const std::uint8_t* bytes, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) h = (h ^ bytes[i]) * 0x100000001b3ull;
  return h;
}

void push_powers(const G1& base, std::uint64_t max, std::vector<std::pair<std::uint64_t, std::uint32_t>>& out) {
  constexpr std::size_t kBatch = 4096;
  std::vector<blst_p1> batch;
  std::vector<blst_p1_affine> affine(kBatch);
  G1 cur;  // identity
  std::uint64_t x = 0;
  while (x < max) {
    batch.clear();
    const std::uint64_t start = x;
    for (; x < max && batch.size() < kBatch; ++x) {
      batch.push_back(cur.raw());
      cur = cur * base;
    }
    std::vector<const blst_p1*> ptrs;
    for (const auto& p : batch) ptrs.push_back(&p);
    // Batch inversion cannot handle the identity; x = 0 is handled alone.
    std::size_t first = 0;
    if (start == 0) {
      std::array<std::uint8_t, 48> enc{};
      blst_p1_compress(enc.data(), &batch[0]);
      out.emplace_back(fold(enc.data(), enc.size()), 0);
      first = 1;
    }
    if (batch.size() > first) {
      blst_p1s_to_affine(affine.data(), ptrs.data() + first, batch.size() - first);
      for (std::size_t i = first; i < batch.size(); ++i) {
        std::array<std::uint8_t, 48> enc{};
        blst_p1_affine_compress(enc.data(), &affine[i - first]);
        out.emplace_back(fold(enc.data(), enc.size()), static_cast<std::uint32_t>(start + i));
      }
    }
  }
}

void push_powers(const Gt& base, std::uint64_t max, std::vector<std::pair<std::uint64_t, std::uint32_t>>& out) {
  Gt cur;
  for (std::uint64_t x = 0; x < max; ++x) {
    out.emplace_back(cur.fingerprint(), static_cast<std::uint32_t>(x));
    cur = cur * base;
  }
}

}  // namespace

std::uint64_t fingerprint(const G1& p) {
  auto enc = p.to_bytes();
  return fold(enc.data(), enc.size());
}

template <class Group>
DLogTable<Group>::DLogTable(const Group& base, std::uint64_t max_exponent) : base_(base), max_(max_exponent) {
  if (max_exponent == 0 || max_exponent > (std::uint64_t{1} << 32))
    throw DomainError("dlog table bound must be in [1, 2^32]");
  entries_.reserve(max_exponent);
  push_powers(base, max_exponent, entries_);
  std::sort(entries_.begin(), entries_.end());
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].first == entries_[i - 1].first) throw Error("dlog table fingerprint collision");
}

template <class Group>
std::optional<std::uint64_t> DLogTable<Group>::find(const Group& elem) const {
  ++thread_op_counts().dlogs;
  const auto key = fingerprint(elem);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(key, std::uint32_t{0}));
  if (it == entries_.end() || it->first != key) return std::nullopt;
  return it->second;
}

template <class Group>
std::uint64_t DLogTable<Group>::lookup(const Group& elem) const {
  auto x = find(elem);
  if (!x) throw NotInTable("discrete log outside [0, " + std::to_string(max_) + ")");
  return *x;
}

template class DLogTable<G1>;
template class DLogTable<Gt>;

std::shared_ptr<const DLogTable<Gt>> shared_gt_dlog(const Gt& base, std::uint64_t max_exponent) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const DLogTable<Gt>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{base.fingerprint(), max_exponent}];
  if (!slot) slot = std::make_shared<const DLogTable<Gt>>(base, max_exponent);
  return slot;
}

}  // namespace cipherflow::algebra

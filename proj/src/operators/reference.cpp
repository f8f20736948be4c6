#include "cipherflow/operators/reference.hpp"

#include <algorithm>

#include "cipherflow/error.hpp"

namespace cipherflow::ops {

ReferenceQuery::ReferenceQuery(OperatorPolicy p, StreamConfig s1, std::optional<StreamConfig> s2)
    : policy_(std::move(p)), s1_(std::move(s1)), s2_(std::move(s2)) {
  policy_.validate(s1_, s2_ ? &*s2_ : nullptr);
}

bool ReferenceQuery::passes(int side, const DataTuple& t) const {
  const auto& preds = policy_.filters_for(side);
  return std::all_of(preds.begin(), preds.end(), [&](const auto& p) { return p.holds(t.value(p.attribute)); });
}

std::vector<PlainRecord> ReferenceQuery::on_tuple(int side, const DataTuple& t) {
  switch (policy_.kind) {
    case OperatorKind::map:
    case OperatorKind::map_filter: {
      if (policy_.kind == OperatorKind::map_filter && !passes(0, t)) return {};
      PlainRecord r{{{"ts", t.ts}}};
      for (const auto& b : policy_.map_attrs) r.fields.emplace_back(b, t.value(b));
      return {r};
    }
    case OperatorKind::filter: {
      if (!passes(0, t)) return {};
      PlainRecord r{{{"ts", t.ts}}};
      r.fields.insert(r.fields.end(), t.values.begin(), t.values.end());
      return {r};
    }
    case OperatorKind::join:
    case OperatorKind::map_filter_join:
      return join(side, t);
    default:
      return aggregate(t);
  }
}

std::vector<PlainRecord> ReferenceQuery::join(int side, const DataTuple& t) {
  const bool mfj = policy_.kind == OperatorKind::map_filter_join;
  if (mfj && !passes(side, t)) return {};
  auto fields = [&](const DataTuple& x, const std::string& prefix) {
    std::vector<std::pair<std::string, std::uint64_t>> f;
    if (mfj) {
      for (const auto& b : policy_.map_attrs) f.emplace_back(prefix + b, x.value(b));
    } else {
      for (const auto& [k, v] : x.values) f.emplace_back(prefix + k, v);
    }
    return f;
  };
  std::vector<PlainRecord> out;
  const auto key = t.value(policy_.join_attr);
  for (const auto& o : buffers_[1 - side]) {
    if (o.value(policy_.join_attr) != key) continue;
    const DataTuple& l = side == 0 ? t : o;
    const DataTuple& r = side == 0 ? o : t;
    PlainRecord rec{{{"ts1", l.ts}, {"ts2", r.ts}}};
    for (auto& f : fields(l, "l.")) rec.fields.push_back(f);
    for (auto& f : fields(r, "r.")) rec.fields.push_back(f);
    out.push_back(std::move(rec));
  }
  auto& own = buffers_[side];
  own.push_back(t);
  const std::size_t cap = side == 0 ? policy_.buffer1 : policy_.buffer2;
  while (own.size() > cap) own.pop_front();
  return out;
}

std::vector<PlainRecord> ReferenceQuery::aggregate(const DataTuple& t) {
  const std::uint32_t ws = policy_.ws;
  // Variant-3 windows start at x; every other aggregate uses windows
  // aligned to multiples of ws, admitted from `start` on.
  const bool shifted = policy_.kind == OperatorKind::filter_agg && policy_.agg_variant == 3;
  const std::uint64_t phase = shifted ? policy_.start % ws : 0;
  const std::uint64_t first = policy_.kind == OperatorKind::filter_agg ? policy_.start : 0;
  if (count_ > 0 && t.ts != next_) count_ = 0;
  if (count_ == 0) {
    if (t.ts % ws != phase || t.ts < first) return {};
    sum_ = 0;
  }
  sum_ += t.value(policy_.agg_attr);
  ++count_;
  next_ = t.ts + 1;
  if (count_ < ws) return {};
  count_ = 0;
  return {PlainRecord{{{"start", t.ts + 1 - ws}, {"end", t.ts}, {"sum", sum_}, {"count", ws}}}};
}

}  // namespace cipherflow::ops

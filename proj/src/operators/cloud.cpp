#include "cipherflow/operators/cloud.hpp"

#include <deque>

#include "cipherflow/error.hpp"

namespace cipherflow::ops {
namespace {

using abe::TransformedCiphertext;
using abe::TransformKey;

const abe::AbeCiphertext& need_abe(const SecureTuple& st, const std::string& label) {
  const auto* c = st.abe(label);
  if (!c) throw ProtocolError("tuple " + std::to_string(st.ts) + " lacks component " + label);
  return *c;
}

const abe::HybridCiphertext& need_hybrid(const SecureTuple& st, const std::string& label) {
  const auto* c = st.hybrid(label);
  if (!c) throw ProtocolError("tuple " + std::to_string(st.ts) + " lacks component " + label);
  return *c;
}

// Map, Filter and Map-Filter: stateless per-tuple transforms.
class SelectQuery final : public ContinuousQuery {
 public:
  SelectQuery(OperatorPolicy p, TransformKey tk) : ContinuousQuery(std::move(p)), tk_(std::move(tk)) {}

  std::vector<OutputRecord> on_tuple(int, const SecureTuple& st) override {
    OutputRecord out{policy_.id, {st.ts}, {}};
    if (policy_.kind == OperatorKind::filter) {
      auto t = abe::abe_trans_hybrid(tk_, need_hybrid(st, kFilterLabel));
      if (!t) return {};
      out.items.push_back({kFilterLabel, std::move(*t)});
      return {std::move(out)};
    }
    const bool mf = policy_.kind == OperatorKind::map_filter;
    for (const auto& b : policy_.map_attrs) {
      const auto label = mf ? mf_label(b) : map_label(b);
      auto t = abe::abe_trans(tk_, need_abe(st, label));
      // Every Map-Filter component carries the same filter attributes, so
      // the first failure means the tuple fails the filter.
      if (!t) return {};
      out.items.push_back({label, std::move(*t)});
    }
    return {std::move(out)};
  }

 private:
  TransformKey tk_;
};

// Agg-1 and the window=1 degenerate case of every aggregate: transform
// each component, multiply per aligned tumbling window.
class BufferedWindowQuery final : public ContinuousQuery {
 public:
  BufferedWindowQuery(OperatorPolicy p, TransformKey tk)
      : ContinuousQuery(std::move(p)),
        tk_(std::move(tk)),
        label_(policy_.ws == 1 ? w1_label(policy_.agg_attr) : agg1_label(policy_.agg_attr, policy_.ws)) {}

  std::vector<OutputRecord> on_tuple(int, const SecureTuple& st) override {
    const std::uint32_t ws = policy_.ws;
    if (count_ > 0 && st.ts != next_) count_ = 0;  // gap: the partial window is lost
    if (count_ == 0 && st.ts % ws != 0) return {};  // wait for an aligned window start
    auto t = abe::abe_trans(tk_, need_abe(st, label_));
    if (!t) throw ProtocolError("aggregate component does not transform under the policy key");
    product_ = count_ == 0 ? std::move(*t) : abe::tct_mul(product_, *t);
    ++count_;
    next_ = st.ts + 1;
    if (count_ < ws) return {};
    count_ = 0;
    return {OutputRecord{policy_.id, {st.ts}, {{"sum", product_}}}};
  }

 private:
  TransformKey tk_;
  std::string label_;
  TransformedCiphertext product_;
  std::uint32_t count_ = 0;
  std::uint64_t next_ = 0;
};

// Agg-2 and Filter+Agg-2: the owner pre-aggregated; one transform per
// boundary component.
class PreAggregatedQuery final : public ContinuousQuery {
 public:
  PreAggregatedQuery(OperatorPolicy p, TransformKey tk)
      : ContinuousQuery(std::move(p)), tk_(std::move(tk)), label_(agg2_label(policy_.agg_attr, policy_.ws)) {}

  std::vector<OutputRecord> on_tuple(int, const SecureTuple& st) override {
    const auto* c = st.abe(label_);
    if (!c) return {};
    auto t = abe::abe_trans(tk_, *c);
    if (!t) return {};
    return {OutputRecord{policy_.id, {st.ts}, {{"sum", std::move(*t)}}}};
  }

 private:
  TransformKey tk_;
  std::string label_;
};

// Agg-3 and Filter+Agg-3. X holds the transformed cumulative mask at the
// previous boundary; each output carries U' (product of masked values) and
// V' = Trans(V_boundary) / X.
class CumulativeQuery final : public ContinuousQuery {
 public:
  CumulativeQuery(algebra::ContextPtr ctx, OperatorPolicy p, TransformKey tk, const StreamConfig& s)
      : ContinuousQuery(std::move(p)),
        tk_(std::move(tk)),
        u_label_(agg3u_label(policy_.agg_attr)),
        v_label_(agg3v_label(policy_.agg_attr)),
        anchor_((policy_.start + policy_.ws - 1) % policy_.ws) {
    if (policy_.start == 0) {
      x_ = abe::tct_plain(ctx->gt_pow(s.agg3_offsets.at(policy_.agg_attr)));
      next_ = 0;
    }
  }

  std::vector<OutputRecord> on_tuple(int, const SecureTuple& st) override {
    const bool boundary = st.ts % policy_.ws == anchor_;
    if (x_ && st.ts != next_) x_.reset();  // gap: restart from the next anchor
    if (!x_) {
      if (boundary && st.ts + 1 >= policy_.start) {
        x_ = abe::abe_trans(tk_, need_abe(st, v_label_));
        if (!x_) throw ProtocolError("cumulative anchor does not transform under the policy key");
        next_ = st.ts + 1;
        count_ = 0;
      }
      return {};
    }
    next_ = st.ts + 1;
    auto u = abe::abe_trans(tk_, need_abe(st, u_label_));
    if (!u) throw ProtocolError("masked value does not transform under the policy key");
    product_ = count_ == 0 ? std::move(*u) : abe::tct_mul(product_, *u);
    ++count_;
    if (!boundary) return {};
    auto z = abe::abe_trans(tk_, need_abe(st, v_label_));
    if (!z) throw ProtocolError("boundary cumulative does not transform under the policy key");
    OutputRecord out{policy_.id, {st.ts}, {{"u", product_}, {"v", abe::tct_div(*z, *x_)}}};
    x_ = std::move(z);
    count_ = 0;
    return {std::move(out)};
  }

 private:
  TransformKey tk_;
  std::string u_label_, v_label_;
  std::uint64_t anchor_;
  std::optional<TransformedCiphertext> x_;
  TransformedCiphertext product_;
  std::uint32_t count_ = 0;
  std::uint64_t next_ = 0;
};

// Join and Map-Filter-Join over count-based FIFO buffers.
class JoinQuery final : public ContinuousQuery {
 public:
  JoinQuery(OperatorPolicy p, std::vector<TransformKey> tks)
      : ContinuousQuery(std::move(p)), tks_(std::move(tks)), det_label_(det_label(policy_.join_attr)) {}

  void set_join_token(const det::JoinToken& token) override {
    token_ = token;
    for (auto& buffer : buffers_)
      for (auto& e : buffer) e.blinded.reset();
  }

  std::vector<OutputRecord> on_tuple(int side, const SecureTuple& st) override {
    if (side != 0 && side != 1) throw ProtocolError("join side must be 0 or 1");
    const auto* det = st.det(det_label_);
    if (!det) throw ProtocolError("tuple lacks component " + det_label_);
    Entry e{st.ts, *det, std::nullopt, {}, std::nullopt, std::nullopt};
    if (policy_.kind == OperatorKind::map_filter_join) {
      for (const auto& b : policy_.map_attrs) {
        auto t = abe::abe_trans(tks_[side], need_abe(st, mf_label(b)));
        if (!t) return {};  // fails this side's filter: never joins
        e.items.push_back({mf_label(b), std::move(*t)});
      }
    } else {
      e.payload = need_hybrid(st, join_label(policy_.join_attr));
    }

    std::vector<OutputRecord> out;
    auto& own = buffers_[side];
    auto& other = buffers_[1 - side];
    if (token_) {
      const auto& key = blinded(e, side);
      for (auto& o : other) {
        if (blinded(o, 1 - side) != key) continue;
        Entry& left = side == 0 ? e : o;
        Entry& right = side == 0 ? o : e;
        OutputRecord rec{policy_.id, {left.ts, right.ts}, {}};
        append(rec, left, 0, "l");
        append(rec, right, 1, "r");
        out.push_back(std::move(rec));
      }
    }
    own.push_back(std::move(e));
    const std::size_t cap = side == 0 ? policy_.buffer1 : policy_.buffer2;
    while (own.size() > cap) own.pop_front();
    return out;
  }

 private:
  struct Entry {
    std::uint64_t ts;
    det::DetCiphertext det;
    std::optional<algebra::G1> blinded;
    std::vector<OutputItem> items;  // Map-Filter-Join: transformed at arrival
    std::optional<abe::HybridCiphertext> payload;  // Join: transformed on first match
    std::optional<abe::TransformedHybrid> transformed;
  };

  const algebra::G1& blinded(Entry& e, int side) {
    if (!e.blinded) e.blinded = det::blind_for_match(e.det, side == 0 ? token_->z1 : token_->z2);
    return *e.blinded;
  }

  void append(OutputRecord& rec, Entry& e, int side, const std::string& prefix) {
    if (e.payload) {
      if (!e.transformed) {
        e.transformed = abe::abe_trans_hybrid(tks_[side], *e.payload);
        if (!e.transformed) throw ProtocolError("join payload does not transform under the policy key");
      }
      rec.items.push_back({prefix, *e.transformed});
      return;
    }
    for (const auto& item : e.items) rec.items.push_back({prefix + ":" + item.label, item.body});
  }

  std::vector<TransformKey> tks_;
  std::string det_label_;
  std::optional<det::JoinToken> token_;
  std::deque<Entry> buffers_[2];
};

}  // namespace

void ContinuousQuery::set_join_token(const det::JoinToken&) {
  throw ProtocolError("policy " + std::to_string(policy_.id) + " is not a join");
}

std::unique_ptr<ContinuousQuery> make_query(algebra::ContextPtr ctx, const CloudBundle& bundle, const StreamConfig& s1,
                                            const StreamConfig* s2) {
  const auto& p = bundle.policy;
  p.validate(s1, s2);
  if (bundle.keys.size() != (is_join(p.kind) ? 2u : 1u)) throw PolicyError("wrong number of transform keys");
  const auto& tk = bundle.keys[0];
  switch (p.kind) {
    case OperatorKind::map:
    case OperatorKind::filter:
    case OperatorKind::map_filter:
      return std::make_unique<SelectQuery>(p, tk);
    case OperatorKind::join:
    case OperatorKind::map_filter_join:
      return std::make_unique<JoinQuery>(p, bundle.keys);
    case OperatorKind::agg1:
      return std::make_unique<BufferedWindowQuery>(p, tk);
    case OperatorKind::agg2:
      if (p.ws == 1) return std::make_unique<BufferedWindowQuery>(p, tk);
      return std::make_unique<PreAggregatedQuery>(p, tk);
    case OperatorKind::agg3:
      if (p.ws == 1) return std::make_unique<BufferedWindowQuery>(p, tk);
      return std::make_unique<CumulativeQuery>(std::move(ctx), p, tk, s1);
    case OperatorKind::filter_agg:
      if (p.agg_variant == 2) return std::make_unique<PreAggregatedQuery>(p, tk);
      return std::make_unique<CumulativeQuery>(std::move(ctx), p, tk, s1);
  }
  throw PolicyError("unknown operator kind");
}

}  // namespace cipherflow::ops

#include "cipherflow/operators/user.hpp"

#include <algorithm>

#include "cipherflow/error.hpp"

namespace cipherflow::ops {
namespace {

constexpr std::uint64_t kBabySteps = std::uint64_t{1} << 16;

const abe::TransformedCiphertext& need_tct(const OutputRecord& rec, const std::string& label) {
  const auto* item = rec.find(label);
  const auto* t = item ? std::get_if<abe::TransformedCiphertext>(&item->body) : nullptr;
  if (!t) throw ProtocolError("output record lacks item " + label);
  return *t;
}

const abe::TransformedHybrid& need_hybrid(const OutputRecord& rec, const std::string& label) {
  const auto* item = rec.find(label);
  const auto* t = item ? std::get_if<abe::TransformedHybrid>(&item->body) : nullptr;
  if (!t) throw ProtocolError("output record lacks item " + label);
  return *t;
}

void append_tuple(PlainRecord& out, const DataTuple& t, const std::string& prefix) {
  for (const auto& [k, v] : t.values) out.fields.emplace_back(prefix + k, v);
}

}  // namespace

std::uint64_t bounded_dlog(const algebra::BilinearContext& ctx, const Gt& elem, std::uint64_t bound) {
  const std::uint64_t baby = std::min(bound, kBabySteps);
  const auto table = algebra::shared_gt_dlog(ctx.gt(), baby);
  std::optional<Gt> giant;  // only needed when the bound exceeds one table
  Gt cur = elem;
  for (std::uint64_t base = 0; base < bound; base += baby) {
    if (auto x = table->find(cur); x && base + *x < bound) return base + *x;
    if (!giant) giant = ctx.gt_pow(baby).inverse();
    cur *= *giant;
  }
  throw NotInTable("discrete log outside [0, " + std::to_string(bound) + ")");
}

UserDecryptor::UserDecryptor(algebra::ContextPtr ctx, UserBundle keys) : ctx_(std::move(ctx)), keys_(std::move(keys)) {}

std::uint64_t UserDecryptor::value_bound(const std::string& attr, int side) const {
  return std::uint64_t{1} << keys_.streams.at(side).width_of(attr);
}

std::uint64_t UserDecryptor::value(const abe::TransformedCiphertext& t, int side, std::uint64_t bound) const {
  return bounded_dlog(*ctx_, abe::abe_dec({keys_.z.at(side)}, t), bound);
}

PlainRecord UserDecryptor::decrypt(const OutputRecord& rec) const {
  const auto& p = keys_.policy;
  if (rec.policy_id != p.id) throw ProtocolError("record belongs to policy " + std::to_string(rec.policy_id));
  if (rec.ts.empty()) throw ProtocolError("record has no timestamp");
  PlainRecord out;
  switch (p.kind) {
    case OperatorKind::map:
    case OperatorKind::map_filter: {
      out.fields.emplace_back("ts", rec.ts[0]);
      for (const auto& b : p.map_attrs) {
        const auto label = p.kind == OperatorKind::map ? map_label(b) : mf_label(b);
        out.fields.emplace_back(b, value(need_tct(rec, label), 0, value_bound(b, 0)));
      }
      return out;
    }
    case OperatorKind::filter: {
      const auto t = DataTuple::from_bytes(abe::abe_dec_bytes({keys_.z.at(0)}, need_hybrid(rec, kFilterLabel)));
      out.fields.emplace_back("ts", t.ts);
      append_tuple(out, t, "");
      return out;
    }
    case OperatorKind::join:
    case OperatorKind::map_filter_join: {
      if (rec.ts.size() != 2) throw ProtocolError("join record needs two timestamps");
      out.fields.emplace_back("ts1", rec.ts[0]);
      out.fields.emplace_back("ts2", rec.ts[1]);
      for (int side = 0; side < 2; ++side) {
        const std::string prefix = side ? "r" : "l";
        if (p.kind == OperatorKind::join) {
          const auto t = DataTuple::from_bytes(abe::abe_dec_bytes({keys_.z.at(side)}, need_hybrid(rec, prefix)));
          append_tuple(out, t, prefix + ".");
        } else {
          for (const auto& b : p.map_attrs)
            out.fields.emplace_back(prefix + "." + b,
                                    value(need_tct(rec, prefix + ":" + mf_label(b)), side, value_bound(b, side)));
        }
      }
      return out;
    }
    case OperatorKind::agg1:
    case OperatorKind::agg2:
    case OperatorKind::agg3:
    case OperatorKind::filter_agg: {
      const std::uint64_t end = rec.ts[0];
      const std::uint64_t bound = p.ws * value_bound(p.agg_attr, 0);
      std::uint64_t sum = 0;
      if (rec.find("u")) {
        const Gt u = abe::abe_dec({keys_.z.at(0)}, need_tct(rec, "u"));
        const Gt v = abe::abe_dec({keys_.z.at(0)}, need_tct(rec, "v"));
        sum = bounded_dlog(*ctx_, u / v, bound);
      } else if (p.kind == OperatorKind::agg1 && p.ws > 1) {
        if (!keys_.agg1_secret) throw KeyError("Agg-1 user bundle lacks the window secret");
        const Gt masked = abe::abe_dec({keys_.z.at(0)}, need_tct(rec, "sum"));
        sum = bounded_dlog(*ctx_, masked / ctx_->gt_pow(*keys_.agg1_secret), bound);
      } else {
        sum = value(need_tct(rec, "sum"), 0, bound);
      }
      out.fields = {{"start", end + 1 - p.ws}, {"end", end}, {"sum", sum}, {"count", p.ws}};
      return out;
    }
  }
  throw ProtocolError("unknown operator kind");
}

det::JoinToken UserDecryptor::join_token(algebra::Rng& rng) const {
  if (!is_join(keys_.policy.kind) || keys_.join_k2.size() != 2) throw KeyError("not a join policy bundle");
  return det::make_join_token(keys_.join_k2[0], keys_.join_k2[1], rng);
}

}  // namespace cipherflow::ops

#include "cipherflow/operators/owner.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include "cipherflow/error.hpp"

namespace cipherflow::ops {
namespace {

using abe::AccessTree;
using policy::Op;
using policy::Predicate;

constexpr std::array<std::uint8_t, 4> kMagic{'C', 'F', 'K', 'B'};
constexpr std::uint8_t kBundleVersion = 1;

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

void write_header(ByteWriter& w, BundleRole role, std::uint32_t policy_id) {
  w.raw(kMagic);
  w.u8(kBundleVersion);
  w.u8(static_cast<std::uint8_t>(role));
  w.u32(policy_id);
}

std::uint32_t read_header(ByteReader& r, BundleRole expected) {
  const auto magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw DecodeError("not a key bundle");
  if (r.u8() != kBundleVersion) throw DecodeError("unsupported key bundle version");
  const auto role = r.u8();
  if (role != static_cast<std::uint8_t>(expected))
    throw KeyError("key bundle has role " + std::to_string(role) + ", expected " +
                   std::to_string(static_cast<int>(expected)));
  return r.u32();
}

AccessTree leaf(std::string a) { return AccessTree::leaf(std::move(a)); }

AccessTree predicate_tree(const StreamConfig& s, const Predicate& p) {
  return policy::compile_predicate(p, s.encoding_of(p.attribute));
}

AccessTree filter_tree(const StreamConfig& s, const std::vector<Predicate>& preds) {
  std::vector<AccessTree> parts;
  for (const auto& p : preds) parts.push_back(predicate_tree(s, p));
  return AccessTree::all_of(std::move(parts));
}

AccessTree map_tree(const std::vector<std::string>& attrs) {
  std::vector<AccessTree> parts;
  for (const auto& a : attrs) parts.push_back(leaf(policy::value_attr(a)));
  return AccessTree::any_of(std::move(parts));
}

AccessTree window_tree(const std::string& a, std::uint32_t ws) {
  return AccessTree::all_of({leaf(policy::value_attr(a)), leaf(policy::window_attr(ws))});
}

}  // namespace

// ---- owner setup ----

OwnerKeys owner_setup(algebra::ContextPtr ctx, StreamConfig config, algebra::Rng& rng,
                      std::optional<Scalar> shared_k1) {
  config.agg3_offsets.clear();
  if (config.enc.agg3)
    for (const auto& a : config.agg_attrs) config.agg3_offsets[a] = Scalar::random(rng);
  config.validate();
  auto [pk, mk] = abe::abe_gen(ctx, config.universe(), rng);
  OwnerKeys keys{std::move(config), std::move(pk), std::move(mk),
                 shared_k1 ? det::det_gen_with_prp_key(*shared_k1, rng) : det::det_gen(rng), {}};
  if (keys.config.enc.agg1)
    for (const auto& a : keys.config.agg_attrs)
      for (auto ws : keys.config.windows)
        if (ws > 1) keys.agg1_secrets[a][ws] = Scalar::random(rng);
  return keys;
}

// ---- encryption ----

StreamEncryptor::StreamEncryptor(algebra::ContextPtr ctx, const OwnerKeys& keys)
    : ctx_(std::move(ctx)), keys_(keys), det_(ctx_, keys.config.join_domain) {
  const auto& c = keys_.config;
  if (c.enc.agg1)
    for (const auto& a : c.agg_attrs)
      for (auto ws : c.windows)
        if (ws > 1) agg1_masks_.emplace(std::pair{a, ws}, swe::ClosingMaskStream(ws, keys_.agg1_secrets.at(a).at(ws)));
  if (c.enc.agg3)
    for (const auto& a : c.agg_attrs) agg3_cumulative_[a] = c.agg3_offsets.at(a);
}

void StreamEncryptor::check(const DataTuple& t) const {
  const auto& c = keys_.config;
  if (c.ts_width < 64 && t.ts >> c.ts_width) throw DomainError("timestamp outside the TS domain");
  if (t.values.size() != c.schema.size()) throw DomainError("tuple does not match the stream schema");
  for (std::size_t i = 0; i < c.schema.size(); ++i) {
    if (t.values[i].first != c.schema[i].name) throw DomainError("tuple does not match the stream schema");
    if (t.values[i].second >> c.schema[i].width) throw DomainError("value outside the domain of " + c.schema[i].name);
  }
  if (last_ts_ && t.ts <= *last_ts_) throw ProtocolError("non-increasing timestamp " + std::to_string(t.ts));
  if (c.needs_contiguous_ts() && t.ts != (last_ts_ ? *last_ts_ + 1 : 0))
    throw ProtocolError("window encodings need contiguous timestamps from 0; got " + std::to_string(t.ts));
}

abe::AbeCiphertext StreamEncryptor::enc_value(const Scalar& exponent, const std::vector<std::string>& attrs,
                                              algebra::Rng& rng) const {
  return abe::abe_enc(ctx_->gt_pow(exponent), keys_.pk, attrs, rng);
}

SecureTuple StreamEncryptor::encrypt(const DataTuple& input, algebra::Rng& rng) {
  const auto& c = keys_.config;
  // Normalise to schema order; unknown or missing attributes are rejected.
  DataTuple t{input.ts, {}};
  for (const auto& d : c.schema) {
    auto it = std::find_if(input.values.begin(), input.values.end(), [&](const auto& kv) { return kv.first == d.name; });
    if (it == input.values.end()) throw DomainError("tuple lacks attribute " + d.name);
    t.values.emplace_back(d.name, it->second);
  }
  if (input.values.size() != c.schema.size()) throw DomainError("tuple has attributes outside the schema");
  check(t);

  SecureTuple out;
  out.ts = t.ts;
  auto add = [&](std::string label, auto body) { out.components.push_back({std::move(label), std::move(body)}); };

  std::vector<std::string> fa_set;
  if (c.enc.filter || c.enc.map_filter) {
    for (const auto& a : c.filter_attrs) {
      append(fa_set, policy::attr_set(a, t.value(a), c.encoding_of(a)));
      if (a != kTs) out.hints.emplace_back(a, t.value(a));
    }
  }

  if (c.enc.map)
    for (const auto& [a, v] : t.values) add(map_label(a), enc_value(Scalar::from_u64(v), {policy::value_attr(a)}, rng));

  if (c.enc.filter) {
    auto attrs = fa_set;
    attrs.push_back(tuple_attr());
    add(kFilterLabel, abe::abe_enc_bytes(t.to_bytes(), keys_.pk, attrs, rng));
  }

  if (c.enc.map_filter) {
    for (const auto& [a, v] : t.values) {
      auto attrs = fa_set;
      attrs.push_back(policy::value_attr(a));
      add(mf_label(a), enc_value(Scalar::from_u64(v), attrs, rng));
    }
  }

  if (c.enc.join) {
    const auto payload = t.to_bytes();
    for (const auto& j : c.join_attrs) {
      add(join_label(j), abe::abe_enc_bytes(payload, keys_.pk, {policy::join_attr(j)}, rng));
      add(det_label(j), det_.encrypt(t.value(j), keys_.det));
    }
  }

  if (c.enc.agg1 || c.enc.agg2 || c.enc.agg3) {
    for (const auto& a : c.agg_attrs)
      add(w1_label(a), enc_value(Scalar::from_u64(t.value(a)), {policy::value_attr(a), policy::window_attr(1)}, rng));
  }

  if (c.enc.agg1) {
    for (const auto& a : c.agg_attrs) {
      for (auto ws : c.windows) {
        if (ws == 1) continue;
        const Scalar r = agg1_masks_.at({a, ws}).next(rng);
        add(agg1_label(a, ws), enc_value(Scalar::from_u64(t.value(a)) + r,
                                         {policy::value_attr(a), policy::window_attr(ws)}, rng));
      }
    }
  }

  std::vector<std::string> ts_set;
  if (c.enc.agg2 || c.enc.agg3) ts_set = policy::attr_set(kTs, t.ts, c.encoding_of(kTs));

  if (c.enc.agg2) {
    for (const auto& a : c.agg_attrs) {
      for (auto ws : c.windows) {
        if (ws == 1) continue;
        auto& sum = agg2_sums_[{a, ws}];
        sum += t.value(a);
        if ((t.ts + 1) % ws != 0) continue;
        auto attrs = ts_set;
        attrs.push_back(policy::value_attr(a));
        attrs.push_back(policy::window_attr(ws));
        add(agg2_label(a, ws), enc_value(Scalar::from_u64(sum), attrs, rng));
        sum = 0;
      }
    }
  }

  if (c.enc.agg3) {
    for (const auto& a : c.agg_attrs) {
      const Scalar r = Scalar::random(rng);
      auto& cumulative = agg3_cumulative_.at(a);
      cumulative += r;
      auto u_attrs = ts_set;
      u_attrs.push_back(masked_attr(a));
      auto v_attrs = ts_set;
      v_attrs.push_back(cumulative_attr(a));
      add(agg3u_label(a), enc_value(Scalar::from_u64(t.value(a)) + r, u_attrs, rng));
      add(agg3v_label(a), enc_value(cumulative, v_attrs, rng));
    }
  }

  last_ts_ = t.ts;
  return out;
}

// ---- key issuance ----

AccessTree policy_tree(const OperatorPolicy& p, const StreamConfig& s, int side) {
  switch (p.kind) {
    case OperatorKind::map:
      return map_tree(p.map_attrs);
    case OperatorKind::filter:
      return AccessTree::all_of({leaf(tuple_attr()), filter_tree(s, p.filters)});
    case OperatorKind::map_filter:
    case OperatorKind::map_filter_join:
      return AccessTree::all_of({map_tree(p.map_attrs), filter_tree(s, p.filters_for(side))});
    case OperatorKind::join:
      return leaf(policy::join_attr(p.join_attr));
    case OperatorKind::agg1:
    case OperatorKind::agg2:
      return window_tree(p.agg_attr, p.ws);
    case OperatorKind::agg3:
      if (p.ws == 1) return window_tree(p.agg_attr, 1);
      return AccessTree::any_of(
          {leaf(masked_attr(p.agg_attr)),
           AccessTree::all_of({leaf(cumulative_attr(p.agg_attr)), predicate_tree(s, {kTs, p.ws - 1, Op::mod, p.ws})})});
    case OperatorKind::filter_agg: {
      const std::uint64_t x = p.start;
      if (p.agg_variant == 2)
        return AccessTree::all_of({leaf(policy::value_attr(p.agg_attr)), leaf(policy::window_attr(p.ws)),
                                   predicate_tree(s, {kTs, x + p.ws - 1, Op::ge, 0})});
      if (x == 0) {
        OperatorPolicy plain = p;
        plain.kind = OperatorKind::agg3;
        return policy_tree(plain, s, side);
      }
      return AccessTree::any_of(
          {AccessTree::all_of({leaf(masked_attr(p.agg_attr)), predicate_tree(s, {kTs, x, Op::ge, 0})}),
           AccessTree::all_of({leaf(cumulative_attr(p.agg_attr)), predicate_tree(s, {kTs, x - 1, Op::ge, 0}),
                               predicate_tree(s, {kTs, (x - 1) % p.ws, Op::mod, p.ws})})});
    }
  }
  throw PolicyError("unknown operator kind");
}

IssuedKeys issue_policy(const OperatorPolicy& p, const OwnerKeys& o1, const OwnerKeys* o2, algebra::Rng& rng) {
  const bool joins = is_join(p.kind);
  if (joins && !o2) throw PolicyError("join policies need both owners' keys");
  p.validate(o1.config, joins ? &o2->config : nullptr);

  IssuedKeys out{{p, {}}, {p, {}, {}, std::nullopt, {}}};
  const int sides = joins ? 2 : 1;
  for (int side = 0; side < sides; ++side) {
    const OwnerKeys& owner = side ? *o2 : o1;
    auto [tk, us] = abe::abe_keygen(owner.mk, policy_tree(p, owner.config, side), rng);
    out.cloud.keys.push_back(std::move(tk));
    out.user.z.push_back(us.z);
    out.user.streams.push_back(owner.config);
  }
  if (joins) {
    if (o1.det.k1 != o2->det.k1) throw KeyError("join streams do not share the PRP key");
    out.user.join_k2 = {o1.det.k2, o2->det.k2};
  }
  if (p.kind == OperatorKind::agg1 && p.ws > 1) out.user.agg1_secret = o1.agg1_secrets.at(p.agg_attr).at(p.ws);
  return out;
}

// ---- bundles ----

Bytes CloudBundle::to_bytes() const {
  ByteWriter w;
  write_header(w, BundleRole::cloud, policy.id);
  policy.write(w);
  w.u8(static_cast<std::uint8_t>(keys.size()));
  for (const auto& k : keys) w.blob(k.to_bytes());
  return std::move(w).bytes();
}

CloudBundle CloudBundle::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto id = read_header(r, BundleRole::cloud);
  CloudBundle b;
  b.policy = OperatorPolicy::read(r);
  if (b.policy.id != id) throw DecodeError("bundle header and policy ids differ");
  const auto n = r.u8();
  for (std::uint8_t i = 0; i < n; ++i) b.keys.push_back(abe::TransformKey::from_bytes(r.blob()));
  r.expect_done();
  if (b.keys.size() != (is_join(b.policy.kind) ? 2u : 1u)) throw DecodeError("wrong number of transform keys");
  return b;
}

Bytes UserBundle::to_bytes() const {
  ByteWriter w;
  write_header(w, BundleRole::user, policy.id);
  policy.write(w);
  w.u8(static_cast<std::uint8_t>(z.size()));
  for (const auto& s : z) w.raw(s.to_bytes());
  w.u8(static_cast<std::uint8_t>(join_k2.size()));
  for (const auto& s : join_k2) w.raw(s.to_bytes());
  w.u8(agg1_secret.has_value());
  if (agg1_secret) w.raw(agg1_secret->to_bytes());
  w.u8(static_cast<std::uint8_t>(streams.size()));
  for (const auto& s : streams) s.write(w);
  return std::move(w).bytes();
}

UserBundle UserBundle::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto id = read_header(r, BundleRole::user);
  UserBundle b;
  b.policy = OperatorPolicy::read(r);
  if (b.policy.id != id) throw DecodeError("bundle header and policy ids differ");
  b.z.resize(r.u8());
  for (auto& s : b.z) s = Scalar::from_bytes(r.raw(Scalar::kBytes));
  b.join_k2.resize(r.u8());
  for (auto& s : b.join_k2) s = Scalar::from_bytes(r.raw(Scalar::kBytes));
  if (r.u8()) b.agg1_secret = Scalar::from_bytes(r.raw(Scalar::kBytes));
  b.streams.resize(r.u8());
  for (auto& s : b.streams) s = StreamConfig::read(r);
  r.expect_done();
  const std::size_t sides = is_join(b.policy.kind) ? 2 : 1;
  if (b.z.size() != sides || b.streams.size() != sides) throw DecodeError("wrong number of user keys");
  return b;
}

Bytes owner_keys_to_bytes(const OwnerKeys& keys) {
  ByteWriter w;
  write_header(w, BundleRole::owner, 0);
  keys.config.write(w);
  w.blob(keys.pk.to_bytes());
  w.blob(keys.mk.to_bytes());
  w.blob(keys.det.to_bytes());
  w.u16(static_cast<std::uint16_t>(keys.agg1_secrets.size()));
  for (const auto& [a, per_ws] : keys.agg1_secrets) {
    w.str(a);
    w.u16(static_cast<std::uint16_t>(per_ws.size()));
    for (const auto& [ws, s] : per_ws) {
      w.u32(ws);
      w.raw(s.to_bytes());
    }
  }
  return std::move(w).bytes();
}

OwnerKeys owner_keys_from_bytes(algebra::ContextPtr ctx, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  read_header(r, BundleRole::owner);
  auto config = StreamConfig::read(r);
  auto pk = abe::PublicKey::from_bytes(ctx, r.blob());
  auto mk = abe::MasterKey::from_bytes(ctx, r.blob());
  auto dk = det::DetKey::from_bytes(r.blob());
  OwnerKeys keys{std::move(config), std::move(pk), std::move(mk), dk, {}};
  const auto n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    auto a = r.str();
    const auto m = r.u16();
    for (std::uint16_t j = 0; j < m; ++j) {
      const auto ws = r.u32();
      keys.agg1_secrets[a][ws] = Scalar::from_bytes(r.raw(Scalar::kBytes));
    }
  }
  r.expect_done();
  if (keys.pk.universe->names() != keys.config.universe()) throw DecodeError("owner keys do not match the stream config");
  return keys;
}

BundleRole bundle_role(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw DecodeError("not a key bundle");
  if (bytes[5] > 2) throw DecodeError("unknown bundle role");
  return static_cast<BundleRole>(bytes[5]);
}

}  // namespace cipherflow::ops

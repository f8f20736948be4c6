#include "cipherflow/swe/swe.hpp"

#include "cipherflow/error.hpp"

namespace cipherflow::swe {

ElGamalCiphertext elgamal_enc(const algebra::BilinearContext& ctx, const Gt& pk, const Gt& m, algebra::Rng& rng) {
  const auto k = Scalar::random_nonzero(rng);
  return {ctx.gt_pow(k), m * pk.pow(k)};
}

Gt elgamal_dec(const Scalar& sk, const ElGamalCiphertext& ct) { return ct.c2 / ct.c1.pow(sk); }

const WindowKey& WindowKeySet::at(std::uint32_t ws) const {
  auto it = keys.find(ws);
  if (it == keys.end()) throw KeyError("no window key for ws=" + std::to_string(ws));
  return it->second;
}

std::vector<std::uint32_t> WindowKeySet::windows() const {
  std::vector<std::uint32_t> out;
  for (const auto& [ws, _] : keys) out.push_back(ws);
  return out;
}

WindowKeySet WindowKeySet::restrict_to(std::uint32_t ws) const {
  WindowKeySet out;
  out.construction = construction;
  out.s_star = s_star;
  out.keys.emplace(ws, at(ws));
  return out;
}

Bytes WindowKeySet::to_bytes() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(construction));
  w.raw(s_star.to_bytes());
  w.u16(static_cast<std::uint16_t>(keys.size()));
  for (const auto& [ws, k] : keys) {
    w.u32(ws);
    w.raw(k.secret.to_bytes());
    if (construction != Construction::masked) w.raw(k.pub.to_bytes());
  }
  return std::move(w).bytes();
}

WindowKeySet WindowKeySet::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  WindowKeySet out;
  const auto c = r.u8();
  if (c < 1 || c > 3) throw DecodeError("unknown window construction");
  out.construction = static_cast<Construction>(c);
  out.s_star = Scalar::from_bytes(r.raw(Scalar::kBytes));
  const auto n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    WindowKey k;
    k.ws = r.u32();
    if (k.ws == 0) throw DecodeError("window size 0");
    k.secret = Scalar::from_bytes(r.raw(Scalar::kBytes));
    if (out.construction != Construction::masked) k.pub = Gt::from_bytes(r.raw(Gt::kBytes));
    out.keys.emplace(k.ws, k);
  }
  r.expect_done();
  return out;
}

WindowKeySet swe_gen(const algebra::BilinearContext& ctx, const std::vector<std::uint32_t>& windows, Construction c,
                     algebra::Rng& rng) {
  if (windows.empty()) throw DomainError("empty window-size set");
  WindowKeySet out;
  out.construction = c;
  out.s_star = Scalar::random(rng);
  for (auto ws : windows) {
    if (ws == 0 || ws > 0xffff) throw DomainError("window size must be in [1, 65535]");
    WindowKey k;
    k.ws = ws;
    k.secret = c == Construction::masked ? Scalar::random(rng) : Scalar::random_nonzero(rng);
    if (c != Construction::masked) k.pub = ctx.gt_pow(k.secret);
    out.keys[ws] = k;
  }
  return out;
}

void Component::write(ByteWriter& w) const {
  w.u16(ws);
  w.u8(static_cast<std::uint8_t>(kind));
  if (kind == ComponentKind::mask) {
    w.raw(masked.to_bytes());
  } else {
    w.raw(sealed.c1.to_bytes());
    w.raw(sealed.c2.to_bytes());
  }
}

Component Component::read(ByteReader& r) {
  Component c;
  c.ws = r.u16();
  const auto kind = r.u8();
  if (kind > 2) throw DecodeError("unknown component kind");
  c.kind = static_cast<ComponentKind>(kind);
  if (c.kind == ComponentKind::mask) {
    c.masked = Gt::from_bytes(r.raw(Gt::kBytes));
  } else {
    c.sealed.c1 = Gt::from_bytes(r.raw(Gt::kBytes));
    c.sealed.c2 = Gt::from_bytes(r.raw(Gt::kBytes));
  }
  return c;
}

std::size_t SweCiphertext::component_count(ComponentKind kind) const {
  std::size_t n = 0;
  for (const auto& t : tuples)
    for (const auto& c : t) n += c.kind == kind;
  return n;
}

Scalar ClosingMaskStream::next(algebra::Rng& rng) {
  Scalar r;
  if (pos_ + 1 == ws_) {
    r = target_ - running_;
    running_ = Scalar{};
    pos_ = 0;
  } else {
    r = Scalar::random(rng);
    running_ += r;
    ++pos_;
  }
  return r;
}

SweEncryptor::SweEncryptor(algebra::ContextPtr ctx, WindowKeySet keys, std::uint64_t value_bound)
    : ctx_(std::move(ctx)), keys_(std::move(keys)), bound_(value_bound), cumulative_(keys_.s_star) {
  if (keys_.keys.empty()) throw DomainError("empty window-size set");
  for (const auto& [ws, k] : keys_.keys) {
    masks_.emplace(ws, ClosingMaskStream(ws, k.secret));
    sums_[ws] = 0;
  }
}

std::vector<Component> SweEncryptor::push(std::uint64_t m, algebra::Rng& rng) {
  if (m >= bound_) throw DomainError("window value outside message domain");
  const auto mv = Scalar::from_u64(m);
  std::vector<Component> out;
  const auto boundary = [&](std::uint32_t ws) { return (pos_ + 1) % ws == 0; };

  switch (keys_.construction) {
    case Construction::masked:
      for (auto& [ws, stream] : masks_) {
        Component c;
        c.ws = static_cast<std::uint16_t>(ws);
        c.masked = ctx_->gt_pow(mv + stream.next(rng));
        out.push_back(c);
      }
      break;
    case Construction::auxiliary:
      for (auto& [ws, sum] : sums_) {
        sum += m;
        if (!boundary(ws)) continue;
        Component c;
        c.ws = static_cast<std::uint16_t>(ws);
        c.kind = ComponentKind::auxsum;
        c.sealed = elgamal_enc(*ctx_, keys_.at(ws).pub, ctx_->gt_pow(sum), rng);
        out.push_back(c);
        sum = 0;
      }
      break;
    case Construction::cumulative: {
      const auto r = Scalar::random(rng);
      cumulative_ += r;
      Component shared;
      shared.masked = ctx_->gt_pow(mv + r);
      out.push_back(shared);
      for (const auto& [ws, k] : keys_.keys) {
        if (!boundary(ws)) continue;
        Component c;
        c.ws = static_cast<std::uint16_t>(ws);
        c.kind = ComponentKind::cumulative;
        c.sealed = elgamal_enc(*ctx_, k.pub, ctx_->gt_pow(cumulative_), rng);
        out.push_back(c);
      }
      break;
    }
  }
  ++pos_;
  return out;
}

SweCiphertext swe_enc(algebra::ContextPtr ctx, std::span<const std::uint64_t> m, const WindowKeySet& keys,
                      algebra::Rng& rng, std::uint64_t value_bound) {
  SweEncryptor enc(std::move(ctx), keys, value_bound);
  SweCiphertext out;
  out.construction = keys.construction;
  for (auto v : m) out.tuples.push_back(enc.push(v, rng));
  return out;
}

SweDecryptor::SweDecryptor(algebra::ContextPtr ctx, Construction c, const WindowKeySet& keys, std::uint32_t ws,
                           std::uint64_t max_sum)
    : ctx_(std::move(ctx)), construction_(c), ws_(ws), key_(keys.at(ws)) {
  table_ = algebra::shared_gt_dlog(ctx_->gt(), max_sum);
  previous_cumulative_ = ctx_->gt_pow(keys.s_star);
}

std::optional<std::uint64_t> SweDecryptor::push(std::span<const Component> tuple) {
  const Component* aux = nullptr;
  for (const auto& c : tuple) {
    if (c.kind == ComponentKind::mask) {
      const bool mine = construction_ == Construction::cumulative ? c.ws == 0 : c.ws == ws_;
      if (mine) product_ *= c.masked;
    } else if (c.ws == ws_) {
      aux = &c;
    }
  }
  ++pos_;
  if (pos_ % ws_ != 0) return std::nullopt;

  Gt sum;
  switch (construction_) {
    case Construction::masked:
      sum = product_ / ctx_->gt_pow(key_.secret);
      break;
    case Construction::auxiliary:
      if (!aux) throw DecodeError("missing window aggregate at boundary");
      sum = elgamal_dec(key_.secret, aux->sealed);
      break;
    case Construction::cumulative: {
      if (!aux) throw DecodeError("missing cumulative mask at boundary");
      const auto cumulative = elgamal_dec(key_.secret, aux->sealed);
      sum = product_ / (cumulative / previous_cumulative_);
      previous_cumulative_ = cumulative;
      break;
    }
  }
  product_ = Gt{};
  return table_->lookup(sum);
}

std::vector<std::uint64_t> swe_dec(algebra::ContextPtr ctx, std::uint32_t ws, const SweCiphertext& ct,
                                   const WindowKeySet& keys, std::uint64_t max_sum) {
  SweDecryptor dec(std::move(ctx), ct.construction, keys, ws, max_sum);
  std::vector<std::uint64_t> out;
  for (const auto& t : ct.tuples)
    if (auto s = dec.push(t)) out.push_back(*s);
  return out;
}

}  // namespace cipherflow::swe

#include "cipherflow/abe/proxy_abe.hpp"

#include <sodium.h>

#include <algorithm>

#include "cipherflow/algebra/lagrange.hpp"
#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/error.hpp"

namespace cipherflow::abe {
namespace {

void write_gt(ByteWriter& w, const Gt& v) { w.raw(v.to_bytes()); }
Gt read_gt(ByteReader& r) { return Gt::from_bytes(r.raw(Gt::kBytes)); }

void keygen_node(const AccessTree& node, const Scalar& secret, const MasterKey& mk, const Scalar& z_inv,
                 std::vector<G2>& out, algebra::Rng& rng) {
  if (node.is_leaf()) {
    const auto idx = mk.universe->at(node.attribute());
    const auto exponent = secret * z_inv * mk.attribute_secrets[idx].inverse();
    out.push_back(mk.ctx->g2().pow(exponent));
    return;
  }
  // q(x) = secret + c_1 x + ... + c_{k-1} x^{k-1}
  std::vector<Scalar> coeffs{secret};
  for (std::size_t i = 1; i < node.threshold(); ++i) coeffs.push_back(Scalar::random(rng));
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    const auto x = Scalar::from_u64(i + 1);
    Scalar y;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = y * x + *it;
    keygen_node(node.children()[i], y, mk, z_inv, out, rng);
  }
}

// Decides satisfaction bottom-up, picking the first `threshold` satisfied
// children at every gate; returns false when the subtree is unsatisfied.
struct LeafTerm {
  std::size_t leaf_index;
  const G1* e_prime;
  Scalar coeff;
};

bool collect_terms(const AccessTree& node, const AbeCiphertext& ct, std::size_t leaf_offset, const Scalar& coeff,
                   std::vector<LeafTerm>& out) {
  if (node.is_leaf()) {
    const G1* comp = ct.component(node.attribute());
    if (!comp) return false;
    out.push_back({leaf_offset, comp, coeff});
    return true;
  }
  // First pass on a scratch list so that unsatisfied gates leave no terms.
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> offsets;
  std::size_t off = leaf_offset;
  for (std::size_t i = 0; i < node.children().size() && chosen.size() < node.threshold(); ++i) {
    std::vector<LeafTerm> scratch;
    if (collect_terms(node.children()[i], ct, off, Scalar::from_u64(1), scratch)) {
      chosen.push_back(i);
      offsets.push_back(off);
    }
    off += node.children()[i].leaf_count();
  }
  if (chosen.size() < node.threshold()) return false;

  std::vector<Scalar> points;
  for (auto i : chosen) points.push_back(Scalar::from_u64(i + 1));
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    const auto delta = algebra::lagrange_coeff(points[j], points, Scalar{});
    collect_terms(node.children()[chosen[j]], ct, offsets[j], coeff * delta, out);
  }
  return true;
}

std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> hybrid_key(const Gt& capsule) {
  std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> key{};
  const auto enc = capsule.to_bytes();
  static const std::uint8_t kPersonal[] = "cipherflow-hybrid";
  crypto_generichash(key.data(), key.size(), enc.data(), enc.size(), kPersonal, sizeof(kPersonal) - 1);
  return key;
}

}  // namespace

// ---- AttributeIndex ----

AttributeIndex::AttributeIndex(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!pos_.emplace(names_[i], i).second) throw PolicyError("duplicate attribute in universe: " + names_[i]);
  }
}

std::optional<std::size_t> AttributeIndex::find(const std::string& name) const {
  auto it = pos_.find(name);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

std::size_t AttributeIndex::at(const std::string& name) const {
  auto idx = find(name);
  if (!idx) throw PolicyError("attribute outside universe: " + name);
  return *idx;
}

// ---- keys ----

Bytes PublicKey::to_bytes() const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(universe->size()));
  for (const auto& n : universe->names()) w.str(n);
  for (const auto& t : attribute_elems) w.raw(t.to_bytes());
  write_gt(w, egg_y);
  return std::move(w).bytes();
}

PublicKey PublicKey::from_bytes(algebra::ContextPtr ctx, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto n = r.u32();
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < n; ++i) names.push_back(r.str());
  PublicKey pk;
  pk.ctx = std::move(ctx);
  pk.universe = std::make_shared<const AttributeIndex>(std::move(names));
  for (std::uint32_t i = 0; i < n; ++i) pk.attribute_elems.push_back(G1::from_bytes(r.raw(G1::kBytes)));
  pk.egg_y = read_gt(r);
  r.expect_done();
  pk.egg_y_table = std::make_shared<const algebra::FixedBaseGt>(pk.egg_y);
  return pk;
}

Bytes MasterKey::to_bytes() const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(universe->size()));
  for (const auto& n : universe->names()) w.str(n);
  w.raw(y.to_bytes());
  for (const auto& t : attribute_secrets) w.raw(t.to_bytes());
  return std::move(w).bytes();
}

MasterKey MasterKey::from_bytes(algebra::ContextPtr ctx, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto n = r.u32();
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < n; ++i) names.push_back(r.str());
  MasterKey mk;
  mk.ctx = std::move(ctx);
  mk.universe = std::make_shared<const AttributeIndex>(std::move(names));
  mk.y = Scalar::from_bytes(r.raw(32));
  for (std::uint32_t i = 0; i < n; ++i) mk.attribute_secrets.push_back(Scalar::from_bytes(r.raw(32)));
  r.expect_done();
  return mk;
}

Bytes TransformKey::to_bytes() const {
  ByteWriter w;
  tree.write(w);
  w.u32(static_cast<std::uint32_t>(leaf_keys.size()));
  for (const auto& d : leaf_keys) w.raw(d.to_bytes());
  return std::move(w).bytes();
}

TransformKey TransformKey::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  TransformKey tk{AccessTree::read(r), {}};
  const auto n = r.u32();
  if (n != tk.tree.leaf_count()) throw DecodeError("transform key leaf count mismatch");
  for (std::uint32_t i = 0; i < n; ++i) tk.leaf_keys.push_back(G2::from_bytes(r.raw(G2::kBytes)));
  r.expect_done();
  return tk;
}

// ---- ciphertexts ----

const G1* AbeCiphertext::component(const std::string& attribute) const {
  auto it = std::lower_bound(attributes.begin(), attributes.end(), attribute);
  if (it == attributes.end() || *it != attribute) return nullptr;
  return &e_prime[static_cast<std::size_t>(it - attributes.begin())];
}

void AbeCiphertext::write(ByteWriter& w) const {
  w.u16(static_cast<std::uint16_t>(attributes.size()));
  for (const auto& a : attributes) w.str(a);
  write_gt(w, e);
  for (std::size_t i = 0; i < e_prime.size(); ++i) {
    w.u16(static_cast<std::uint16_t>(i));
    w.raw(e_prime[i].to_bytes());
  }
}

AbeCiphertext AbeCiphertext::read(ByteReader& r) {
  AbeCiphertext ct;
  const auto n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) ct.attributes.push_back(r.str());
  if (!std::is_sorted(ct.attributes.begin(), ct.attributes.end()) ||
      std::adjacent_find(ct.attributes.begin(), ct.attributes.end()) != ct.attributes.end())
    throw DecodeError("ciphertext attributes not sorted and unique");
  ct.e = read_gt(r);
  ct.e_prime.resize(n);
  std::vector<bool> seen(n, false);
  for (std::uint16_t i = 0; i < n; ++i) {
    const auto idx = r.u16();
    if (idx >= n || seen[idx]) throw DecodeError("bad attribute index in ciphertext");
    seen[idx] = true;
    ct.e_prime[idx] = G1::from_bytes(r.raw(G1::kBytes));
  }
  return ct;
}

Bytes AbeCiphertext::to_bytes() const {
  ByteWriter w;
  write(w);
  return std::move(w).bytes();
}

AbeCiphertext AbeCiphertext::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto ct = read(r);
  r.expect_done();
  return ct;
}

void TransformedCiphertext::write(ByteWriter& w) const {
  write_gt(w, u);
  write_gt(w, v);
}

TransformedCiphertext TransformedCiphertext::read(ByteReader& r) {
  auto u = read_gt(r);
  auto v = read_gt(r);
  return {u, v};
}

// ---- scheme ----

std::pair<PublicKey, MasterKey> abe_gen(algebra::ContextPtr ctx, std::vector<std::string> universe,
                                        algebra::Rng& rng) {
  if (universe.empty()) throw PolicyError("empty attribute universe");
  auto index = std::make_shared<const AttributeIndex>(std::move(universe));
  MasterKey mk;
  mk.ctx = ctx;
  mk.universe = index;
  mk.y = Scalar::random_nonzero(rng);
  PublicKey pk;
  pk.ctx = ctx;
  pk.universe = index;
  for (std::size_t i = 0; i < index->size(); ++i) {
    mk.attribute_secrets.push_back(Scalar::random_nonzero(rng));
    pk.attribute_elems.push_back(ctx->g1().pow(mk.attribute_secrets.back()));
  }
  pk.egg_y = ctx->gt_pow(mk.y);
  pk.egg_y_table = std::make_shared<const algebra::FixedBaseGt>(pk.egg_y);
  return {std::move(pk), std::move(mk)};
}

std::pair<TransformKey, UserSecret> abe_keygen(const MasterKey& mk, const AccessTree& tree, algebra::Rng& rng) {
  for (const auto& a : tree.leaf_attributes()) mk.universe->at(a);
  UserSecret sk{Scalar::random_nonzero(rng)};
  TransformKey tk{tree, {}};
  tk.leaf_keys.reserve(tree.leaf_count());
  keygen_node(tree, mk.y, mk, sk.z.inverse(), tk.leaf_keys, rng);
  return {std::move(tk), sk};
}

AbeCiphertext abe_enc(const Gt& m, const PublicKey& pk, const std::vector<std::string>& attributes,
                      algebra::Rng& rng) {
  AbeCiphertext ct;
  ct.attributes = attributes;
  std::sort(ct.attributes.begin(), ct.attributes.end());
  ct.attributes.erase(std::unique(ct.attributes.begin(), ct.attributes.end()), ct.attributes.end());
  std::vector<std::size_t> idx;
  for (const auto& a : ct.attributes) idx.push_back(pk.universe->at(a));

  const auto s = Scalar::random_nonzero(rng);
  ct.e = m * pk.egg_y_table->pow(s);
  ct.e_prime.reserve(idx.size());
  for (auto i : idx) ct.e_prime.push_back(pk.attribute_elems[i].pow(s));
  return ct;
}

std::optional<TransformedCiphertext> abe_trans(const TransformKey& tk, const AbeCiphertext& ct) {
  std::vector<LeafTerm> terms;
  if (!collect_terms(tk.tree, ct, 0, Scalar::from_u64(1), terms)) return std::nullopt;
  std::vector<std::pair<G1, G2>> pairs;
  pairs.reserve(terms.size());
  for (const auto& t : terms) {
    const bool unit = t.coeff == Scalar::from_u64(1);
    pairs.emplace_back(unit ? *t.e_prime : t.e_prime->pow(t.coeff), tk.leaf_keys.at(t.leaf_index));
  }
  ++algebra::thread_op_counts().transforms;
  return TransformedCiphertext{ct.e, algebra::multi_pairing(pairs)};
}

Gt abe_dec(const UserSecret& sk, const TransformedCiphertext& tct) { return tct.u / tct.v.pow(sk.z); }

TransformedCiphertext tct_mul(const TransformedCiphertext& a, const TransformedCiphertext& b) {
  algebra::thread_op_counts().gt_muls += 2;
  return {a.u * b.u, a.v * b.v};
}

TransformedCiphertext tct_div(const TransformedCiphertext& a, const TransformedCiphertext& b) {
  algebra::thread_op_counts().gt_muls += 2;
  return {a.u / b.u, a.v / b.v};
}

// ---- hybrid payloads ----

void HybridCiphertext::write(ByteWriter& w) const {
  capsule.write(w);
  w.blob(sealed);
}

HybridCiphertext HybridCiphertext::read(ByteReader& r) {
  auto capsule = AbeCiphertext::read(r);
  return {std::move(capsule), r.blob()};
}

void TransformedHybrid::write(ByteWriter& w) const {
  capsule.write(w);
  w.blob(sealed);
}

TransformedHybrid TransformedHybrid::read(ByteReader& r) {
  auto capsule = TransformedCiphertext::read(r);
  return {capsule, r.blob()};
}

HybridCiphertext abe_enc_bytes(std::span<const std::uint8_t> payload, const PublicKey& pk,
                               const std::vector<std::string>& attributes, algebra::Rng& rng) {
  const auto session = pk.ctx->gt_pow(Scalar::random_nonzero(rng));
  const auto key = hybrid_key(session);
  Bytes sealed(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES + payload.size() +
               crypto_aead_xchacha20poly1305_ietf_ABYTES);
  rng.fill(std::span(sealed.data(), crypto_aead_xchacha20poly1305_ietf_NPUBBYTES));
  unsigned long long clen = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(sealed.data() + crypto_aead_xchacha20poly1305_ietf_NPUBBYTES, &clen,
                                             payload.data(), payload.size(), nullptr, 0, nullptr, sealed.data(),
                                             key.data());
  return {abe_enc(session, pk, attributes, rng), std::move(sealed)};
}

std::optional<TransformedHybrid> abe_trans_hybrid(const TransformKey& tk, const HybridCiphertext& ct) {
  auto capsule = abe_trans(tk, ct.capsule);
  if (!capsule) return std::nullopt;
  return TransformedHybrid{*capsule, ct.sealed};
}

Bytes abe_dec_bytes(const UserSecret& sk, const TransformedHybrid& tct) {
  constexpr auto kNonce = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  constexpr auto kTag = crypto_aead_xchacha20poly1305_ietf_ABYTES;
  if (tct.sealed.size() < kNonce + kTag) throw DecodeError("sealed payload too short");
  const auto key = hybrid_key(abe_dec(sk, tct.capsule));
  Bytes out(tct.sealed.size() - kNonce - kTag);
  unsigned long long mlen = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(out.data(), &mlen, nullptr, tct.sealed.data() + kNonce,
                                                 tct.sealed.size() - kNonce, nullptr, 0, tct.sealed.data(),
                                                 key.data()) != 0)
    throw KeyError("payload authentication failed (key mismatch)");
  out.resize(mlen);
  return out;
}

}  // namespace cipherflow::abe

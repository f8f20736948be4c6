#include "cipherflow/det/det_cipher.hpp"

#include <map>
#include <mutex>

#include "cipherflow/algebra/prp.hpp"
#include "cipherflow/error.hpp"

namespace cipherflow::det {

Bytes DetKey::to_bytes() const {
  ByteWriter w;
  w.raw(k1.to_bytes());
  w.raw(k2.to_bytes());
  return std::move(w).bytes();
}

DetKey DetKey::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  DetKey key{Scalar::from_bytes(r.raw(32)), Scalar::from_bytes(r.raw(32))};
  r.expect_done();
  if (key.k2.is_zero()) throw KeyError("deterministic key exponent is zero");
  return key;
}

DetKey det_gen(algebra::Rng& rng) { return {Scalar::random(rng), Scalar::random_nonzero(rng)}; }

DetKey det_gen_with_prp_key(const Scalar& shared_k1, algebra::Rng& rng) {
  return {shared_k1, Scalar::random_nonzero(rng)};
}

DetCipher::DetCipher(algebra::ContextPtr ctx, std::uint64_t message_domain)
    : ctx_(std::move(ctx)), domain_(message_domain) {
  if (domain_ == 0 || domain_ > algebra::SmallDomainPrp::kMaxDomain)
    throw DomainError("message domain must be in [1, 2^32]");
}

DetCiphertext DetCipher::encrypt(std::uint64_t m, const DetKey& key) const {
  if (m >= domain_) throw DomainError("join value " + std::to_string(m) + " outside message domain");
  const auto permuted = algebra::SmallDomainPrp(key.k1, domain_).apply(m);
  // F(k1, m)^k2 = (g^pi(m))^k2, folded into one exponentiation.
  return {ctx_->g1().pow(Scalar::from_u64(permuted) * key.k2)};
}

std::uint64_t DetCipher::decrypt(const DetCiphertext& ct, const DetKey& key) const {
  const auto unblinded = ct.element.pow(key.k2.inverse());
  const auto permuted = table().lookup(unblinded);
  return algebra::SmallDomainPrp(key.k1, domain_).invert(permuted);
}

const algebra::DLogTable<G1>& DetCipher::table() const {
  std::call_once(table_once_, [this] {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const algebra::DLogTable<G1>>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[domain_];
    if (!slot) slot = std::make_shared<const algebra::DLogTable<G1>>(ctx_->g1(), domain_);
    table_ = slot;
  });
  return *table_;
}

Bytes JoinToken::to_bytes() const {
  ByteWriter w;
  w.raw(z1.to_bytes());
  w.raw(z2.to_bytes());
  return std::move(w).bytes();
}

JoinToken JoinToken::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  JoinToken t{Scalar::from_bytes(r.raw(32)), Scalar::from_bytes(r.raw(32))};
  r.expect_done();
  return t;
}

JoinToken make_join_token(const Scalar& k1_2, const Scalar& k2_2, algebra::Rng& rng) {
  const auto s = Scalar::random_nonzero(rng);
  return {s / k1_2, s / k2_2};
}

G1 blind_for_match(const DetCiphertext& ct, const Scalar& z) { return ct.element.pow(z); }

}  // namespace cipherflow::det

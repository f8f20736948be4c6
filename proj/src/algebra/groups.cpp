#include "cipherflow/algebra/groups.hpp"

#include <cstring>
#include <vector>

#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/error.hpp"

namespace cipherflow::algebra {
namespace {

constexpr std::size_t kScalarBits = 255;

}  // namespace

// ---- G1 ----

G1::G1() : p_{} {}

G1 G1::generator() {
  G1 g;
  g.p_ = *blst_p1_generator();
  return g;
}

G1 G1::operator*(const G1& o) const {
  G1 r;
  blst_p1_add_or_double(&r.p_, &p_, &o.p_);
  return r;
}

G1 G1::inverse() const {
  G1 r = *this;
  blst_p1_cneg(&r.p_, true);
  return r;
}

G1 G1::pow(const Scalar& e) const {
  ++thread_op_counts().g1_exps;
  auto raw = e.to_blst();
  G1 r;
  blst_p1_mult(&r.p_, &p_, raw.b, kScalarBits);
  return r;
}

bool G1::is_identity() const { return blst_p1_is_inf(&p_); }

bool G1::operator==(const G1& o) const { return blst_p1_is_equal(&p_, &o.p_); }

blst_p1_affine G1::affine() const {
  blst_p1_affine a;
  blst_p1_to_affine(&a, &p_);
  return a;
}

std::array<std::uint8_t, G1::kBytes> G1::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  blst_p1_compress(out.data(), &p_);
  return out;
}

G1 G1::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kBytes) throw DecodeError("G1 element must be 48 bytes");
  blst_p1_affine a;
  if (blst_p1_uncompress(&a, bytes.data()) != BLST_SUCCESS) throw DecodeError("invalid G1 encoding");
  if (!blst_p1_affine_in_g1(&a)) throw DecodeError("G1 point outside prime-order subgroup");
  G1 r;
  blst_p1_from_affine(&r.p_, &a);
  return r;
}

// ---- G2 ----

G2::G2() : p_{} {}

G2 G2::generator() {
  G2 g;
  g.p_ = *blst_p2_generator();
  return g;
}

G2 G2::operator*(const G2& o) const {
  G2 r;
  blst_p2_add_or_double(&r.p_, &p_, &o.p_);
  return r;
}

G2 G2::inverse() const {
  G2 r = *this;
  blst_p2_cneg(&r.p_, true);
  return r;
}

G2 G2::pow(const Scalar& e) const {
  ++thread_op_counts().g2_exps;
  auto raw = e.to_blst();
  G2 r;
  blst_p2_mult(&r.p_, &p_, raw.b, kScalarBits);
  return r;
}

bool G2::is_identity() const { return blst_p2_is_inf(&p_); }

bool G2::operator==(const G2& o) const { return blst_p2_is_equal(&p_, &o.p_); }

blst_p2_affine G2::affine() const {
  blst_p2_affine a;
  blst_p2_to_affine(&a, &p_);
  return a;
}

std::array<std::uint8_t, G2::kBytes> G2::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  blst_p2_compress(out.data(), &p_);
  return out;
}

G2 G2::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kBytes) throw DecodeError("G2 element must be 96 bytes");
  blst_p2_affine a;
  if (blst_p2_uncompress(&a, bytes.data()) != BLST_SUCCESS) throw DecodeError("invalid G2 encoding");
  if (!blst_p2_affine_in_g2(&a)) throw DecodeError("G2 point outside prime-order subgroup");
  G2 r;
  blst_p2_from_affine(&r.p_, &a);
  return r;
}

// ---- Gt ----

Gt::Gt() : v_(*blst_fp12_one()) {}

Gt Gt::operator*(const Gt& o) const {
  Gt r;
  blst_fp12_mul(&r.v_, &v_, &o.v_);
  return r;
}

Gt Gt::inverse() const {
  Gt r = *this;
  blst_fp12_conjugate(&r.v_);
  return r;
}

Gt Gt::square() const {
  Gt r;
  blst_fp12_cyclotomic_sqr(&r.v_, &v_);
  return r;
}

Gt Gt::pow(const Scalar& e) const {
  ++thread_op_counts().gt_exps;
  // Fixed 4-bit window over the little-endian exponent.
  auto raw = e.to_blst();
  std::array<blst_fp12, 16> table;
  table[0] = *blst_fp12_one();
  table[1] = v_;
  for (int i = 2; i < 16; ++i) blst_fp12_mul(&table[i], &table[i - 1], &v_);

  blst_fp12 acc = *blst_fp12_one();
  bool started = false;
  for (int nibble = 63; nibble >= 0; --nibble) {
    if (started)
      for (int k = 0; k < 4; ++k) blst_fp12_cyclotomic_sqr(&acc, &acc);
    const unsigned digit = (raw.b[nibble / 2] >> (4 * (nibble % 2))) & 15u;
    if (digit != 0) {
      if (started) {
        blst_fp12_mul(&acc, &acc, &table[digit]);
      } else {
        acc = table[digit];
        started = true;
      }
    }
  }
  return Gt(acc);
}

Gt Gt::pow_u64(std::uint64_t e) const {
  ++thread_op_counts().gt_exps;
  blst_fp12 acc = *blst_fp12_one();
  blst_fp12 base = v_;
  while (e != 0) {
    if (e & 1) blst_fp12_mul(&acc, &acc, &base);
    e >>= 1;
    if (e != 0) blst_fp12_cyclotomic_sqr(&base, &base);
  }
  return Gt(acc);
}

bool Gt::is_identity() const { return blst_fp12_is_one(&v_); }

bool Gt::operator==(const Gt& o) const { return blst_fp12_is_equal(&v_, &o.v_); }

std::array<std::uint8_t, Gt::kBytes> Gt::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  std::size_t off = 0;
  for (const auto& c6 : v_.fp6)
    for (const auto& c2 : c6.fp2)
      for (const auto& c : c2.fp) {
        blst_bendian_from_fp(out.data() + off, &c);
        off += 48;
      }
  return out;
}

Gt Gt::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kBytes) throw DecodeError("Gt element must be 576 bytes");
  blst_fp12 v;
  std::size_t off = 0;
  for (auto& c6 : v.fp6)
    for (auto& c2 : c6.fp2)
      for (auto& c : c2.fp) {
        blst_fp_from_bendian(&c, bytes.data() + off);
        std::array<std::uint8_t, 48> back{};
        blst_bendian_from_fp(back.data(), &c);
        if (std::memcmp(back.data(), bytes.data() + off, 48) != 0) throw DecodeError("non-canonical Gt coordinate");
        off += 48;
      }
  if (!blst_fp12_in_group(&v)) throw DecodeError("Gt element outside target group");
  return Gt(v);
}

std::uint64_t Gt::fingerprint() const {
  // Coordinates are pseudo-random; folding two of them is plenty for a
  // table keyed by at most a few million entries.
  std::uint64_t h = 0;
  const auto* limbs = reinterpret_cast<const std::uint64_t*>(&v_);
  constexpr std::size_t n = sizeof(blst_fp12) / sizeof(std::uint64_t);
  for (std::size_t i = 0; i < n; ++i) h = (h ^ limbs[i]) * 0x100000001b3ull + (h >> 29);
  return h;
}

// ---- pairing ----

Gt pairing(const G1& p, const G2& q) {
  if (p.is_identity() || q.is_identity()) return Gt{};
  auto& ops = thread_op_counts();
  ++ops.pairings;
  ++ops.final_exps;
  const auto pa = p.affine();
  const auto qa = q.affine();
  blst_fp12 ml;
  blst_miller_loop(&ml, &qa, &pa);
  blst_fp12 out;
  blst_final_exp(&out, &ml);
  return Gt(out);
}

Gt multi_pairing(std::span<const std::pair<G1, G2>> terms) {
  std::vector<blst_p1_affine> ps;
  std::vector<blst_p2_affine> qs;
  ps.reserve(terms.size());
  qs.reserve(terms.size());
  for (const auto& [p, q] : terms) {
    if (p.is_identity() || q.is_identity()) continue;
    ps.push_back(p.affine());
    qs.push_back(q.affine());
  }
  if (ps.empty()) return Gt{};
  auto& ops = thread_op_counts();
  ops.pairings += ps.size();
  ++ops.final_exps;

  blst_fp12 acc = *blst_fp12_one();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    blst_fp12 ml;
    blst_miller_loop(&ml, &qs[i], &ps[i]);
    blst_fp12_mul(&acc, &acc, &ml);
  }
  blst_fp12 out;
  blst_final_exp(&out, &acc);
  return Gt(out);
}

}  // namespace cipherflow::algebra

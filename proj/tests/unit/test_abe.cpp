#include <gtest/gtest.h>

#include <set>

#include "cipherflow/abe/proxy_abe.hpp"
#include "cipherflow/algebra/dlog.hpp"
#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/error.hpp"

using namespace cipherflow;
using namespace cipherflow::abe;

namespace {

struct AbeTest : ::testing::Test {
  algebra::ContextPtr ctx = algebra::BilinearContext::setup();
  algebra::Rng rng = algebra::Rng::seeded(21);
  std::pair<PublicKey, MasterKey> keys = abe_gen(ctx, {"a", "b", "c", "d"}, rng);
  const PublicKey& pk = keys.first;
  const MasterKey& mk = keys.second;

  AccessTree leaf(const char* a) { return AccessTree::leaf(a); }
  Gt random_msg() { return ctx->gt_pow(Scalar::random(rng)); }
};

}  // namespace

TEST_F(AbeTest, GenShapes) {
  EXPECT_EQ(pk.attribute_elems.size(), 4u);
  EXPECT_EQ(mk.attribute_secrets.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(algebra::pairing(pk.attribute_elems[i], ctx->g2()), ctx->gt().pow(mk.attribute_secrets[i]));
  EXPECT_EQ(pk.egg_y, ctx->gt().pow(mk.y));
  const auto again = abe_gen(ctx, {"a"}, rng);
  EXPECT_NE(again.second.y, mk.y);
  EXPECT_THROW(abe_gen(ctx, {"a", "a"}, rng), PolicyError);
}

TEST_F(AbeTest, SingleLeafKeyIdentity) {
  const auto [tk, sk] = abe_keygen(mk, leaf("b"), rng);
  ASSERT_EQ(tk.leaf_keys.size(), 1u);
  EXPECT_EQ(algebra::pairing(pk.attribute_elems[1], tk.leaf_keys[0]).pow(sk.z), pk.egg_y);
}

TEST_F(AbeTest, SingleLeafTransformIdentity) {
  const auto [tk, sk] = abe_keygen(mk, leaf("a"), rng);
  const auto m = random_msg();
  const auto ct = abe_enc(m, pk, {"a", "c"}, rng);
  const auto tct = abe_trans(tk, ct);
  ASSERT_TRUE(tct);
  EXPECT_EQ(tct->v, algebra::pairing(*ct.component("a"), tk.leaf_keys[0]));
  EXPECT_EQ(tct->u / tct->v.pow(sk.z), m);
  EXPECT_FALSE(abe_trans(tk, abe_enc(m, pk, {"b"}, rng)));
}

TEST_F(AbeTest, OrTreeDecryptsWithEitherAttribute) {
  const auto [tk, sk] = abe_keygen(mk, AccessTree::any_of({leaf("a"), leaf("b")}), rng);
  for (const char* attr : {"a", "b"}) {
    const auto m = random_msg();
    const auto tct = abe_trans(tk, abe_enc(m, pk, {attr}, rng));
    ASSERT_TRUE(tct);
    EXPECT_EQ(abe_dec(sk, *tct), m);
  }
}

TEST_F(AbeTest, AndTreeNeedsBoth) {
  const auto [tk, sk] = abe_keygen(mk, AccessTree::all_of({leaf("a"), leaf("b")}), rng);
  EXPECT_FALSE(abe_trans(tk, abe_enc(random_msg(), pk, {"a"}, rng)));
  const auto m = random_msg();
  const auto tct = abe_trans(tk, abe_enc(m, pk, {"a", "b"}, rng));
  ASSERT_TRUE(tct);
  EXPECT_EQ(abe_dec(sk, *tct), m);
}

TEST_F(AbeTest, TransformMatchesBooleanOracleOnAllSubsets) {
  const auto tree = AccessTree::all_of({leaf("a"), AccessTree::any_of({leaf("b"), leaf("c")})});
  const auto [tk, sk] = abe_keygen(mk, tree, rng);
  const std::vector<std::string> names{"a", "b", "c"};
  for (unsigned mask = 0; mask < 8; ++mask) {
    std::vector<std::string> attrs;
    for (unsigned i = 0; i < 3; ++i)
      if (mask >> i & 1) attrs.push_back(names[i]);
    // Hand oracle: a and (b or c).
    const bool expect = (mask & 1) && (mask & 6);
    if (attrs.empty()) continue;
    const auto m = random_msg();
    const auto tct = abe_trans(tk, abe_enc(m, pk, attrs, rng));
    ASSERT_EQ(tct.has_value(), expect) << mask;
    if (tct) {
      ASSERT_EQ(abe_dec(sk, *tct), m);
    }
  }
}

TEST_F(AbeTest, ThresholdGate) {
  const auto tree = AccessTree::gate(2, {leaf("a"), leaf("b"), leaf("c"), leaf("d")});
  const auto [tk, sk] = abe_keygen(mk, tree, rng);
  EXPECT_FALSE(abe_trans(tk, abe_enc(random_msg(), pk, {"c"}, rng)));
  const auto m = random_msg();
  const auto tct = abe_trans(tk, abe_enc(m, pk, {"b", "d", "c"}, rng));
  ASSERT_TRUE(tct);
  EXPECT_EQ(abe_dec(sk, *tct), m);
}

TEST_F(AbeTest, WrongUserSecretFails) {
  const auto [tk, sk] = abe_keygen(mk, leaf("a"), rng);
  const auto [tk2, sk2] = abe_keygen(mk, leaf("a"), rng);
  const auto m = random_msg();
  const auto tct = abe_trans(tk, abe_enc(m, pk, {"a"}, rng));
  EXPECT_NE(abe_dec(sk2, *tct), m);
  EXPECT_NE(sk.z, sk2.z);
}

TEST_F(AbeTest, UnknownAttributesRejected) {
  EXPECT_THROW(abe_keygen(mk, leaf("zz"), rng), PolicyError);
  EXPECT_THROW(abe_enc(random_msg(), pk, {"zz"}, rng), PolicyError);
}

TEST_F(AbeTest, EncryptionIsProbabilistic) {
  const auto m = random_msg();
  std::set<Bytes> seen;
  for (int i = 0; i < 100; ++i) ASSERT_TRUE(seen.insert(abe_enc(m, pk, {"a"}, rng).to_bytes()).second);
}

TEST_F(AbeTest, CiphertextWireRoundTrip) {
  const auto ct = abe_enc(random_msg(), pk, {"d", "a", "b", "a"}, rng);
  EXPECT_EQ(ct.attributes, (std::vector<std::string>{"a", "b", "d"}));
  const auto bytes = ct.to_bytes();
  // u16 count, 3 x (u16 + 1 byte), Gt, 3 x (u16 + G1).
  EXPECT_EQ(bytes.size(), 2 + 3 * 3 + Gt::kBytes + 3 * (2 + G1::kBytes));
  const auto back = AbeCiphertext::from_bytes(bytes);
  EXPECT_EQ(back.attributes, ct.attributes);
  EXPECT_EQ(back.e, ct.e);
  EXPECT_EQ(back.e_prime, ct.e_prime);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(AbeCiphertext::from_bytes(truncated), DecodeError);
}

TEST_F(AbeTest, KeySerializationRoundTrip) {
  const auto tree = AccessTree::gate(2, {leaf("a"), AccessTree::any_of({leaf("b"), leaf("c")}), leaf("d")});
  const auto [tk, sk] = abe_keygen(mk, tree, rng);
  const auto tk2 = TransformKey::from_bytes(tk.to_bytes());
  EXPECT_EQ(tk2.tree, tk.tree);
  EXPECT_EQ(tk2.leaf_keys, tk.leaf_keys);
  const auto pk2 = PublicKey::from_bytes(ctx, pk.to_bytes());
  const auto mk2 = MasterKey::from_bytes(ctx, mk.to_bytes());
  EXPECT_EQ(pk2.attribute_elems, pk.attribute_elems);
  EXPECT_EQ(mk2.y, mk.y);
  const auto m = random_msg();
  const auto tct = abe_trans(tk2, abe_enc(m, pk2, {"a", "c"}, rng));
  ASSERT_TRUE(tct);
  EXPECT_EQ(abe_dec(sk, *tct), m);
}

TEST_F(AbeTest, HomomorphicProductAndQuotient) {
  const auto [tk, sk] = abe_keygen(mk, leaf("a"), rng);
  algebra::DLogTable<Gt> table(ctx->gt(), 1024);
  auto enc = [&](std::uint64_t v) { return *abe_trans(tk, abe_enc(ctx->gt_pow(v), pk, {"a"}, rng)); };
  const auto x = enc(300), y = enc(200), z = enc(7);
  EXPECT_EQ(table.lookup(abe_dec(sk, tct_mul(x, y))), 500u);
  EXPECT_EQ(table.lookup(abe_dec(sk, tct_div(x, y))), 100u);
  EXPECT_TRUE(abe_dec(sk, tct_div(x, x)).is_identity());
  EXPECT_EQ(abe_dec(sk, tct_mul(tct_mul(x, y), z)), abe_dec(sk, tct_mul(x, tct_mul(y, z))));
  EXPECT_EQ(abe_dec(sk, tct_mul(x, tct_plain(ctx->gt_pow(std::uint64_t{1})))), ctx->gt_pow(std::uint64_t{301}));
}

TEST_F(AbeTest, HybridPayloadRoundTrip) {
  const auto [tk, sk] = abe_keygen(mk, leaf("c"), rng);
  const auto [tk2, sk2] = abe_keygen(mk, leaf("c"), rng);
  const Bytes payload{'h', 'e', 'l', 'l', 'o'};
  const auto ct = abe_enc_bytes(payload, pk, {"c"}, rng);
  const auto tct = abe_trans_hybrid(tk, ct);
  ASSERT_TRUE(tct);
  EXPECT_EQ(abe_dec_bytes(sk, *tct), payload);
  EXPECT_THROW(abe_dec_bytes(sk2, *tct), KeyError);
  EXPECT_FALSE(abe_trans_hybrid(abe_keygen(mk, leaf("a"), rng).first, ct));
}

TEST_F(AbeTest, TransformUsesOneFinalExponentiation) {
  const auto tree = AccessTree::all_of({leaf("a"), leaf("b"), leaf("c")});
  const auto [tk, sk] = abe_keygen(mk, tree, rng);
  const auto ct = abe_enc(random_msg(), pk, {"a", "b", "c"}, rng);
  algebra::OpCounter counter;
  ASSERT_TRUE(abe_trans(tk, ct));
  const auto d = counter.delta();
  EXPECT_EQ(d.pairings, 3u);
  EXPECT_EQ(d.final_exps, 1u);
  EXPECT_EQ(d.transforms, 1u);
}

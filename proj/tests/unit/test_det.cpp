#include <gtest/gtest.h>

#include <set>

#include "cipherflow/det/det_cipher.hpp"
#include "cipherflow/error.hpp"

using namespace cipherflow;
using namespace cipherflow::det;

namespace {

struct DetTest : ::testing::Test {
  algebra::ContextPtr ctx = algebra::BilinearContext::setup();
  algebra::Rng rng = algebra::Rng::seeded(11);
  DetCipher cipher{ctx, 1024};
};

}  // namespace

TEST_F(DetTest, KeysDifferAndAreInvertible) {
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) {
    const auto k = det_gen(rng);
    ASSERT_FALSE(k.k2.is_zero());
    ASSERT_EQ(k.k2 * k.k2.inverse(), algebra::Scalar::from_u64(1));
    ASSERT_TRUE(seen.insert(k.k1.to_hex() + k.k2.to_hex()).second);
  }
}

TEST_F(DetTest, KeySerializationRoundTrip) {
  const auto k = det_gen(rng);
  EXPECT_EQ(DetKey::from_bytes(k.to_bytes()), k);
  auto zero = k.to_bytes();
  std::fill(zero.begin() + 32, zero.end(), 0);
  EXPECT_THROW(DetKey::from_bytes(zero), KeyError);
}

TEST_F(DetTest, Deterministic) {
  const auto k = det_gen(rng);
  EXPECT_EQ(cipher.encrypt(5, k).to_bytes(), cipher.encrypt(5, k).to_bytes());
}

TEST_F(DetTest, InjectiveOverWholeDomain) {
  const auto k = det_gen(rng);
  std::set<std::array<std::uint8_t, 48>> seen;
  for (std::uint64_t m = 0; m < cipher.message_domain(); ++m) ASSERT_TRUE(seen.insert(cipher.encrypt(m, k).to_bytes()).second);
}

TEST_F(DetTest, RoundTripExhaustive) {
  const auto k = det_gen(rng);
  for (std::uint64_t m = 0; m < 256; ++m) ASSERT_EQ(cipher.decrypt(cipher.encrypt(m, k), k), m);
}

TEST_F(DetTest, RejectsOutOfDomain) {
  const auto k = det_gen(rng);
  EXPECT_THROW(cipher.encrypt(1024, k), DomainError);
}

TEST_F(DetTest, KeysSeparateCiphertexts) {
  const auto a = det_gen(rng);
  const auto b = det_gen(rng);
  int wrong = 0;
  for (int i = 0; i < 50; ++i) {
    const auto m = rng.uniform(cipher.message_domain());
    ASSERT_NE(cipher.encrypt(m, a), cipher.encrypt(m, b));
    try {
      wrong += cipher.decrypt(cipher.encrypt(m, a), b) != m;
    } catch (const NotInTable&) {
      ++wrong;
    }
  }
  EXPECT_EQ(wrong, 50);
}

TEST_F(DetTest, JoinTokenMatchesExactlyEqualValues) {
  const auto k1 = det_gen(rng);
  const auto k2 = det_gen_with_prp_key(k1.k1, rng);
  for (int session = 0; session < 3; ++session) {
    const auto tok = make_join_token(k1.k2, k2.k2, rng);
    EXPECT_EQ(JoinToken::from_bytes(tok.to_bytes()).z1, tok.z1);
    for (std::uint64_t a = 0; a < 16; ++a)
      for (std::uint64_t b = 0; b < 16; ++b)
        ASSERT_EQ(join_match(cipher.encrypt(a, k1), cipher.encrypt(b, k2), tok), a == b);
  }
}

TEST_F(DetTest, SelfJoinMatches) {
  const auto k = det_gen(rng);
  const auto tok = make_join_token(k.k2, k.k2, rng);
  const auto ct = cipher.encrypt(9, k);
  EXPECT_TRUE(join_match(ct, ct, tok));
}

#include <gtest/gtest.h>

#include <numeric>

#include "cipherflow/error.hpp"
#include "cipherflow/swe/swe.hpp"

using namespace cipherflow;
using namespace cipherflow::swe;

namespace {

// Brute-force tumbling-window sums; trailing partial window dropped.
std::vector<std::uint64_t> window_sums(const std::vector<std::uint64_t>& m, std::uint32_t ws) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i + ws <= m.size(); i += ws) out.push_back(std::accumulate(m.begin() + i, m.begin() + i + ws, 0ull));
  return out;
}

constexpr Construction kAll[] = {Construction::masked, Construction::auxiliary, Construction::cumulative};

struct SweTest : ::testing::TestWithParam<Construction> {
  algebra::ContextPtr ctx = algebra::BilinearContext::setup();
  algebra::Rng rng = algebra::Rng::seeded(31);
};

}  // namespace

TEST_P(SweTest, KeysPerWindowAndRoundTrip) {
  const auto keys = swe_gen(*ctx, {2, 4}, GetParam(), rng);
  EXPECT_EQ(keys.keys.size(), 2u);
  EXPECT_NE(keys.at(2).secret, keys.at(4).secret);
  const auto back = WindowKeySet::from_bytes(keys.to_bytes());
  EXPECT_EQ(back.windows(), keys.windows());
  EXPECT_EQ(back.at(4).secret, keys.at(4).secret);
  EXPECT_EQ(back.at(4).pub, keys.at(4).pub);
  EXPECT_EQ(back.s_star, keys.s_star);
  EXPECT_THROW(keys.at(3), KeyError);
  EXPECT_THROW(swe_gen(*ctx, {}, GetParam(), rng), DomainError);
}

TEST_P(SweTest, SmallExamples) {
  const auto keys = swe_gen(*ctx, {2, 4}, GetParam(), rng);
  const std::vector<std::uint64_t> zeros{0, 0, 0, 0}, ramp{1, 2, 3, 4};
  EXPECT_EQ(swe_dec(ctx, 2, swe_enc(ctx, zeros, keys, rng), keys), (std::vector<std::uint64_t>{0, 0}));
  const auto ct = swe_enc(ctx, ramp, keys, rng);
  EXPECT_EQ(swe_dec(ctx, 2, ct, keys), (std::vector<std::uint64_t>{3, 7}));
  EXPECT_EQ(swe_dec(ctx, 4, ct, keys), (std::vector<std::uint64_t>{10}));
}

TEST_P(SweTest, TrailingPartialWindowIsNotDelivered) {
  const auto keys = swe_gen(*ctx, {2}, GetParam(), rng);
  const std::vector<std::uint64_t> m{5, 6, 7, 8, 9};
  EXPECT_EQ(swe_dec(ctx, 2, swe_enc(ctx, m, keys, rng), keys), (std::vector<std::uint64_t>{11, 15}));
}

TEST_P(SweTest, RandomStreamsMatchBruteForce) {
  const auto keys = swe_gen(*ctx, {1, 2, 4, 8}, GetParam(), rng);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<std::uint64_t> m(1 + rng.uniform(64));
    for (auto& v : m) v = rng.uniform(256);
    const auto ct = swe_enc(ctx, m, keys, rng);
    for (std::uint32_t ws : {1u, 2u, 4u, 8u}) ASSERT_EQ(swe_dec(ctx, ws, ct, keys.restrict_to(ws)), window_sums(m, ws));
  }
}

TEST_P(SweTest, WholeStreamWindow) {
  std::vector<std::uint64_t> m(12);
  for (auto& v : m) v = rng.uniform(256);
  const auto keys = swe_gen(*ctx, {12}, GetParam(), rng);
  EXPECT_EQ(swe_dec(ctx, 12, swe_enc(ctx, m, keys, rng), keys),
            (std::vector<std::uint64_t>{std::accumulate(m.begin(), m.end(), 0ull)}));
}

TEST_P(SweTest, OtherWindowKeyNeverYieldsSums) {
  const auto keys = swe_gen(*ctx, {2, 4}, GetParam(), rng);
  auto forged = keys;
  forged.keys[2].secret = keys.at(4).secret;
  forged.keys[2].pub = keys.at(4).pub;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::uint64_t> m(8);
    for (auto& v : m) v = rng.uniform(256);
    const auto ct = swe_enc(ctx, m, keys, rng);
    try {
      EXPECT_NE(swe_dec(ctx, 2, ct, forged), window_sums(m, 2));
    } catch (const NotInTable&) {
    }
  }
}

TEST_P(SweTest, EqualWindowSumsGiveSameShape) {
  const auto keys = swe_gen(*ctx, {2, 4}, GetParam(), rng);
  const std::vector<std::uint64_t> a{1, 9, 3, 3, 0, 10, 7, 1}, b{5, 5, 6, 0, 6, 4, 4, 4};
  ASSERT_EQ(window_sums(a, 2), window_sums(b, 2));
  const auto ca = swe_enc(ctx, a, keys, rng), cb = swe_enc(ctx, b, keys, rng);
  ASSERT_EQ(ca.tuples.size(), cb.tuples.size());
  for (std::size_t i = 0; i < ca.tuples.size(); ++i) {
    ASSERT_EQ(ca.tuples[i].size(), cb.tuples[i].size());
    for (std::size_t j = 0; j < ca.tuples[i].size(); ++j) {
      EXPECT_EQ(ca.tuples[i][j].ws, cb.tuples[i][j].ws);
      EXPECT_EQ(ca.tuples[i][j].kind, cb.tuples[i][j].kind);
    }
  }
}

TEST_P(SweTest, ComponentFramingRoundTrip) {
  const auto keys = swe_gen(*ctx, {2}, GetParam(), rng);
  const std::vector<std::uint64_t> m{3, 4};
  for (const auto& t : swe_enc(ctx, m, keys, rng).tuples) {
    for (const auto& c : t) {
      ByteWriter w;
      c.write(w);
      EXPECT_EQ(w.size(), 3 + (c.kind == ComponentKind::mask ? 1 : 2) * Gt::kBytes);
      ByteReader r(w.bytes());
      const auto back = Component::read(r);
      EXPECT_EQ(back.ws, c.ws);
      EXPECT_EQ(back.kind, c.kind);
      EXPECT_EQ(back.masked, c.masked);
      EXPECT_EQ(back.sealed.c2, c.sealed.c2);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllConstructions, SweTest, ::testing::ValuesIn(kAll));

TEST(SweMasked, MaskSumsCloseToKey) {
  auto rng = algebra::Rng::seeded(32);
  const auto target = algebra::Scalar::random(rng);
  for (std::uint32_t ws : {1u, 3u, 5u}) {
    ClosingMaskStream s(ws, target);
    for (int w = 0; w < 4; ++w) {
      algebra::Scalar sum;
      for (std::uint32_t i = 0; i < ws; ++i) sum += s.next(rng);
      ASSERT_EQ(sum, target);
    }
  }
}

TEST(SweAuxiliary, OneCiphertextPerBoundary) {
  const auto ctx = algebra::BilinearContext::setup();
  auto rng = algebra::Rng::seeded(33);
  const auto keys = swe_gen(*ctx, {2, 4, 8}, Construction::auxiliary, rng);
  std::vector<std::uint64_t> m(64, 1);
  const auto ct = swe_enc(ctx, m, keys, rng);
  EXPECT_EQ(ct.component_count(ComponentKind::auxsum), 32u + 16u + 8u);
  EXPECT_EQ(ct.component_count(ComponentKind::mask), 0u);
}

TEST(SweCumulative, TelescopingIdentity) {
  const auto ctx = algebra::BilinearContext::setup();
  auto rng = algebra::Rng::seeded(34);
  const auto keys = swe_gen(*ctx, {3}, Construction::cumulative, rng);
  const std::vector<std::uint64_t> m{1, 2, 3, 4, 5, 6};
  const auto ct = swe_enc(ctx, m, keys, rng);
  // Dividing consecutive boundary cumulatives isolates each window's mask
  // sum; the shared stream's window product over it is gt^(window sum).
  Gt previous = ctx->gt_pow(keys.s_star);
  Gt product;
  std::size_t window = 0;
  const auto sums = window_sums(m, 3);
  for (const auto& t : ct.tuples) {
    for (const auto& c : t) {
      if (c.kind == ComponentKind::mask) product *= c.masked;
      if (c.kind == ComponentKind::cumulative) {
        const auto cur = elgamal_dec(keys.at(3).secret, c.sealed);
        EXPECT_EQ(product / (cur / previous), ctx->gt_pow(sums[window++]));
        previous = cur;
        product = Gt{};
      }
    }
  }
  EXPECT_EQ(window, 2u);
}

TEST(SweEncryptor, RejectsOutOfDomainValues) {
  const auto ctx = algebra::BilinearContext::setup();
  auto rng = algebra::Rng::seeded(35);
  SweEncryptor enc(ctx, swe_gen(*ctx, {2}, Construction::masked, rng), 256);
  EXPECT_THROW(enc.push(256, rng), DomainError);
}

#include <gmp.h>
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cipherflow/algebra/context.hpp"
#include "cipherflow/algebra/dlog.hpp"
#include "cipherflow/algebra/lagrange.hpp"
#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/algebra/prp.hpp"
#include "cipherflow/error.hpp"

using namespace cipherflow;
using namespace cipherflow::algebra;

namespace {

ContextPtr ctx() { return BilinearContext::setup(128); }

}  // namespace

TEST(Setup, GroupOrderIsA255BitPrime) {
  const auto be = ctx()->order_be();
  mpz_t p;
  mpz_init(p);
  mpz_import(p, be.size(), 1, 1, 1, 0, be.data());
  EXPECT_EQ(mpz_sizeinbase(p, 2), 255u);
  EXPECT_GT(mpz_probab_prime_p(p, 40), 0);
  mpz_clear(p);
}

TEST(Setup, RejectsUnsupportedSecurity) {
  EXPECT_THROW(BilinearContext::setup(80), Error);
  EXPECT_EQ(ctx().get(), BilinearContext::setup(128).get());
}

TEST(Pairing, SmallExponentIdentity) {
  const auto c = ctx();
  const auto lhs = pairing(c->g1().pow(Scalar::from_u64(2)), c->g2().pow(Scalar::from_u64(3)));
  EXPECT_EQ(lhs, c->gt().pow(Scalar::from_u64(6)));
  EXPECT_TRUE(c->gt().pow(Scalar{}).is_identity());
  EXPECT_FALSE(c->gt().is_identity());
}

TEST(Pairing, BilinearOnRandomScalars) {
  const auto c = ctx();
  auto rng = Rng::seeded(1);
  for (int i = 0; i < 100; ++i) {
    const auto a = Scalar::random(rng);
    const auto b = Scalar::random(rng);
    const auto u = c->g1().pow(Scalar::random(rng));
    const auto v = c->g2().pow(Scalar::random(rng));
    ASSERT_EQ(pairing(u.pow(a), v.pow(b)), pairing(u, v).pow(a * b));
  }
}

TEST(Pairing, MultiPairingMatchesProduct) {
  const auto c = ctx();
  auto rng = Rng::seeded(2);
  std::vector<std::pair<G1, G2>> terms;
  Gt expect;
  for (int i = 0; i < 4; ++i) {
    terms.emplace_back(c->g1().pow(Scalar::random(rng)), c->g2().pow(Scalar::random(rng)));
    expect *= pairing(terms.back().first, terms.back().second);
  }
  terms.emplace_back(G1{}, c->g2());
  EXPECT_EQ(multi_pairing(terms), expect);
}

TEST(Gt, FixedBaseAgreesWithVariableBase) {
  const auto c = ctx();
  auto rng = Rng::seeded(3);
  for (int i = 0; i < 20; ++i) {
    const auto e = Scalar::random(rng);
    ASSERT_EQ(c->gt_pow(e), c->gt().pow(e));
  }
  EXPECT_EQ(c->gt_pow(std::uint64_t{5}), c->gt().pow_u64(5));
}

TEST(Codec, GroupElementsRoundTrip) {
  const auto c = ctx();
  auto rng = Rng::seeded(4);
  const auto s = Scalar::random(rng);
  EXPECT_EQ(Scalar::from_bytes(s.to_bytes()), s);
  const auto p1 = c->g1().pow(s);
  const auto p2 = c->g2().pow(s);
  const auto t = c->gt_pow(s);
  EXPECT_EQ(G1::from_bytes(p1.to_bytes()), p1);
  EXPECT_EQ(G2::from_bytes(p2.to_bytes()), p2);
  EXPECT_EQ(Gt::from_bytes(t.to_bytes()), t);
  auto bad = t.to_bytes();
  bad[100] ^= 1;
  EXPECT_THROW(Gt::from_bytes(bad), DecodeError);
  std::array<std::uint8_t, 32> over{};
  over.fill(0xff);
  EXPECT_THROW(Scalar::from_bytes(over), DecodeError);
}

TEST(Scalar, RandomDrawsAreDistinctAndInvertible) {
  auto rng = Rng::system();
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto s = Scalar::random(rng);
    ASSERT_TRUE(seen.insert(s.to_hex()).second);
    if (!s.is_zero()) {
      ASSERT_EQ(s * s.inverse(), Scalar::from_u64(1));
    }
  }
  EXPECT_THROW(Scalar{}.inverse(), KeyError);
}

TEST(Scalar, LowBitsAreUniform) {
  auto rng = Rng::seeded(5);
  constexpr int n = 10000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(Scalar::random(rng).low_u64() & 0xffffffffu);
  const double mean = sum / n;
  const double sigma = std::ldexp(1.0, 32) / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
  EXPECT_LT(std::abs(mean - std::ldexp(1.0, 31)), 5 * sigma);
}

TEST(Scalar, ArithmeticMatchesSmallIntegers) {
  EXPECT_EQ(Scalar::from_u64(7) - Scalar::from_u64(9), Scalar::from_i64(-2));
  EXPECT_EQ(Scalar::from_u64(6) / Scalar::from_u64(3), Scalar::from_u64(2));
  EXPECT_EQ(-Scalar::from_u64(1) + Scalar::from_u64(1), Scalar{});
}

TEST(Prp, RoundTrip) {
  const auto key = Scalar::from_u64(99);
  EXPECT_EQ(prp_invert(key, prp_apply(key, 7, 256), 256), 7u);
  EXPECT_THROW(prp_apply(key, 256, 256), DomainError);
  EXPECT_THROW(SmallDomainPrp(key, 0), DomainError);
}

TEST(Prp, BijectionOnEveryDomainUpTo1024) {
  auto rng = Rng::seeded(6);
  const auto key = Scalar::random(rng);
  for (std::uint64_t d = 1; d <= 1024; ++d) {
    SmallDomainPrp prp(key, d);
    std::vector<bool> hit(d, false);
    for (std::uint64_t m = 0; m < d; ++m) {
      const auto c = prp.apply(m);
      ASSERT_LT(c, d);
      ASSERT_FALSE(hit[c]) << "domain " << d;
      hit[c] = true;
      ASSERT_EQ(prp.invert(c), m);
    }
  }
}

TEST(Prp, KeysGiveDifferentPermutations) {
  SmallDomainPrp a(Scalar::from_u64(1), 256), b(Scalar::from_u64(2), 256);
  int differ = 0;
  for (std::uint64_t m = 0; m < 256; ++m) differ += a.apply(m) != b.apply(m);
  EXPECT_GT(differ, 0);
  // A 4-round Feistel is not the identity on a small domain.
  int fixed = 0;
  for (std::uint64_t m = 0; m < 256; ++m) fixed += a.apply(m) == m;
  EXPECT_LT(fixed, 32);
}

TEST(Lagrange, HandValues) {
  const std::vector<Scalar> s{Scalar::from_u64(1), Scalar::from_u64(2)};
  EXPECT_EQ(lagrange_coeff(s[0], s, Scalar{}), Scalar::from_u64(2));
  EXPECT_EQ(lagrange_coeff(s[1], s, Scalar{}), Scalar::from_i64(-1));
  const std::vector<Scalar> one{Scalar::from_u64(5)};
  EXPECT_EQ(lagrange_coeff(one[0], one, Scalar::from_u64(77)), Scalar::from_u64(1));
  const std::vector<Scalar> dup{Scalar::from_u64(3), Scalar::from_u64(3)};
  EXPECT_THROW(lagrange_coeff(dup[0], dup, Scalar{}), DomainError);
  EXPECT_THROW(lagrange_coeff(Scalar::from_u64(9), s, Scalar{}), DomainError);
}

TEST(Lagrange, ReconstructsRandomPolynomials) {
  auto rng = Rng::seeded(7);
  for (int degree = 1; degree <= 4; ++degree) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<Scalar> coeffs;
      for (int i = 0; i <= degree; ++i) coeffs.push_back(Scalar::random(rng));
      auto eval = [&](const Scalar& x) {
        Scalar y;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = y * x + *it;
        return y;
      };
      std::set<std::uint64_t> picks;
      while (picks.size() < static_cast<std::size_t>(degree + 1)) picks.insert(1 + rng.uniform(50));
      std::vector<Scalar> pts;
      for (auto p : picks) pts.push_back(Scalar::from_u64(p));
      const auto x = Scalar::random(rng);
      Scalar at_zero, at_x;
      for (const auto& p : pts) {
        at_zero += eval(p) * lagrange_coeff(p, pts, Scalar{});
        at_x += eval(p) * lagrange_coeff(p, pts, x);
      }
      ASSERT_EQ(at_zero, coeffs[0]);
      ASSERT_EQ(at_x, eval(x));
    }
  }
}

TEST(DLog, TargetGroupTable) {
  const auto c = ctx();
  DLogTable<Gt> table(c->gt(), 1 << 16);
  EXPECT_EQ(table.lookup(Gt{}), 0u);
  EXPECT_EQ(table.lookup(c->gt_pow(std::uint64_t{12345})), 12345u);
  EXPECT_EQ(table.lookup(c->gt_pow(std::uint64_t{65535})), 65535u);
  EXPECT_THROW(table.lookup(c->gt_pow(std::uint64_t{1} << 16)), NotInTable);
  OpCounter counter;
  EXPECT_FALSE(table.find(c->gt_pow(std::uint64_t{1} << 20)).has_value());
  EXPECT_EQ(counter.delta().dlogs, 1u);
}

TEST(DLog, SourceGroupTableIsExhaustive) {
  const auto c = ctx();
  constexpr std::uint64_t max = 4096;
  DLogTable<G1> table(c->g1(), max);
  G1 acc;
  for (std::uint64_t x = 0; x < max; ++x) {
    ASSERT_EQ(table.lookup(acc), x);
    acc = acc * c->g1();
  }
  EXPECT_THROW(table.lookup(acc), NotInTable);
}

TEST(DLog, SharedCacheReturnsSameTable) {
  const auto c = ctx();
  auto a = shared_gt_dlog(c->gt(), 1024);
  auto b = shared_gt_dlog(c->gt(), 1024);
  EXPECT_EQ(a.get(), b.get());
}

TEST(OpCounts, PairingIsCounted) {
  const auto c = ctx();
  OpCounter counter;
  pairing(c->g1(), c->g2());
  c->gt().pow(Scalar::from_u64(3));
  const auto d = counter.delta();
  EXPECT_EQ(d.pairings, 1u);
  EXPECT_EQ(d.final_exps, 1u);
  EXPECT_EQ(d.gt_exps, 1u);
}

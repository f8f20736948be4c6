#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cipherflow/error.hpp"
#include "cipherflow/policy/compiler.hpp"

using namespace cipherflow;
using namespace cipherflow::policy;

namespace {

abe::AttributeSet as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

bool eval(const AccessTree& t, std::string_view attr, std::uint64_t v, const Encoding& enc) {
  return t.evaluate(as_set(attr_set(attr, v, enc)));
}

// Independent oracle: recover (base, pos, digit) from the canonical string.
struct Parsed {
  std::string attr;
  unsigned base, pos, digit;
};
Parsed parse_bit(const std::string& s) {
  Parsed p{};
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '|') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  EXPECT_EQ(parts.size(), 5u);
  p.attr = parts[1];
  p.base = std::stoul(parts[2]);
  p.pos = std::stoul(parts[3]);
  p.digit = std::stoul(parts[4]);
  return p;
}

Encoding enc_with(std::vector<unsigned> bases, unsigned width) {
  Encoding e;
  e.bases = std::move(bases);
  e.width = width;
  return e;
}

}  // namespace

TEST(BagOfBits, FiveInThreeBinaryDigits) {
  EXPECT_EQ(bag_of_bits("A", 5, 2, 3),
            (std::vector<std::string>{"att|A|2|0|1", "att|A|2|1|0", "att|A|2|2|1"}));
  for (const auto& s : bag_of_bits("A", 0, 2, 8)) EXPECT_EQ(parse_bit(s).digit, 0u);
}

TEST(BagOfBits, ReassemblesBaseThreeDigits) {
  for (std::uint64_t v = 0; v < 81; ++v) {
    std::uint64_t back = 0, scale = 1;
    const auto bits = bag_of_bits("A", v, 3, 8);
    ASSERT_EQ(bits.size(), 6u);
    for (const auto& s : bits) {
      const auto p = parse_bit(s);
      back += p.digit * scale;
      scale *= 3;
    }
    ASSERT_EQ(back, v);
  }
  EXPECT_THROW(bag_of_bits("A", 256, 2, 8), DomainError);
}

TEST(BagOfBits, DigitCounts) {
  EXPECT_EQ(digit_count(2, 8), 8u);
  EXPECT_EQ(digit_count(3, 8), 6u);  // 3^5 = 243 < 256
  EXPECT_EQ(digit_count(5, 8), 4u);
  EXPECT_EQ(digit_count(2, 16), 16u);
  EXPECT_EQ(digit_count(3, 16), 11u);
}

TEST(AttrSet, CardinalityMonotonicityWildcard) {
  const auto e = enc_with({2, 3, 5}, 8);
  for (std::uint64_t v : {0u, 17u, 255u}) {
    const auto as = attr_set("A", v, e);
    EXPECT_EQ(as.size(), 8u + 6u + 4u + 1u);
    EXPECT_EQ(as_set(as).size(), as.size());
    EXPECT_TRUE(as_set(as).count("dc|A"));
    const auto small = as_set(attr_set("A", v, enc_with({2}, 8)));
    const auto big = as_set(attr_set("A", v, enc_with({2, 3}, 8)));
    EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST(CondGe, ElevenInFourBits) {
  const auto t = cond_ge("A", "1101", 3);  // 11 least-significant first
  for (std::uint64_t v = 0; v < 16; ++v) EXPECT_EQ(eval(t, "A", v, enc_with({2}, 4)), v >= 11) << v;
}

TEST(CondGe, BoundaryConstants) {
  const auto e = enc_with({2}, 4);
  const auto zero = compile_predicate({"A", 0, Op::ge, 0}, e);
  EXPECT_TRUE(zero.is_leaf());
  for (std::uint64_t v = 0; v < 16; ++v) EXPECT_TRUE(eval(zero, "A", v, e));
  const auto top = compile_predicate({"A", 15, Op::ge, 0}, e);
  for (std::uint64_t v = 0; v < 16; ++v) EXPECT_EQ(eval(top, "A", v, e), v == 15);
  EXPECT_THROW(compile_predicate({"A", 16, Op::ge, 0}, e), PolicyError);
}

TEST(CondLe, ElevenInFourBitsAndMax) {
  const auto e = enc_with({2}, 4);
  const auto t = cond_le("A", "1101", 3);
  for (std::uint64_t v = 0; v < 16; ++v) EXPECT_EQ(eval(t, "A", v, e), v <= 11);
  const auto all = compile_predicate({"A", 15, Op::le, 0}, e);
  for (std::uint64_t v = 0; v < 16; ++v) EXPECT_TRUE(eval(all, "A", v, e));
}

TEST(CondLe, LeAndGeIsEquality) {
  const auto e = enc_with({2}, 5);
  for (std::uint64_t k = 0; k < 32; ++k) {
    const auto both = AccessTree::all_of({compile_predicate({"A", k, Op::le, 0}, e), compile_predicate({"A", k, Op::ge, 0}, e)});
    for (std::uint64_t v = 0; v < 32; ++v) ASSERT_EQ(eval(both, "A", v, e), v == k);
  }
}

TEST(Compile, EqualityAndModExamples) {
  const auto e = enc_with({2, 3, 5}, 6);
  const auto five = compile_predicate({"A", 5, Op::eq, 0}, e);
  for (std::uint64_t v = 0; v < 64; ++v) EXPECT_EQ(eval(five, "A", v, e), v == 5);

  const auto mod4 = compile_predicate({"A", 7, Op::mod, 4}, e);
  EXPECT_EQ(mod4.leaf_attributes(), (std::vector<std::string>{"att|A|2|0|1", "att|A|2|1|1"}));
  for (std::uint64_t v = 0; v < 64; ++v) EXPECT_EQ(eval(mod4, "A", v, e), v % 4 == 3);

  const auto mod6 = compile_predicate({"A", 10, Op::mod, 6}, e);
  for (std::uint64_t v = 0; v < 64; ++v) EXPECT_EQ(eval(mod6, "A", v, e), v % 2 == 0 && v % 3 == 1);
}

TEST(Compile, ModErrors) {
  const auto e = enc_with({2, 3, 5}, 8);
  EXPECT_THROW(compile_predicate({"A", 1, Op::mod, 7}, e), PolicyError);
  EXPECT_THROW(compile_predicate({"A", 1, Op::mod, 14}, e), PolicyError);
  EXPECT_THROW(compile_predicate({"A", 1, Op::mod, 512}, e), PolicyError);
  EXPECT_NO_THROW(compile_predicate({"A", 1, Op::mod, 256}, e));
  EXPECT_THROW(compile_predicate({"A", 1, Op::le, 0}, enc_with({3}, 8)), PolicyError);
}

TEST(Compile, ExhaustiveEightBitEquivalence) {
  const auto e = enc_with({2, 3, 5}, 8);
  std::vector<abe::AttributeSet> sets;
  for (std::uint64_t v = 0; v < 256; ++v) sets.push_back(as_set(attr_set("A", v, e)));
  std::vector<Predicate> preds;
  for (std::uint64_t k = 0; k < 256; ++k) {
    preds.push_back({"A", k, Op::eq, 0});
    preds.push_back({"A", k, Op::le, 0});
    preds.push_back({"A", k, Op::ge, 0});
    for (std::uint64_t m : {2, 3, 4, 5, 6, 8, 9}) preds.push_back({"A", k, Op::mod, m});
  }
  for (const auto& p : preds) {
    const auto t = compile_predicate(p, e);
    for (std::uint64_t v = 0; v < 256; ++v) ASSERT_EQ(t.evaluate(sets[v]), p.holds(v)) << p.to_string() << " v=" << v;
  }
}

TEST(Compile, FilterConjunction) {
  const auto e = enc_with({2}, 5);
  const auto t = compile_filter({{"TS", 4, Op::ge, 0}, {"TS", 8, Op::le, 0}}, e);
  for (std::uint64_t v = 0; v < 32; ++v) EXPECT_EQ(eval(t, "TS", v, e), v >= 4 && v <= 8);
}

TEST(Parse, Forms) {
  EXPECT_EQ(parse_predicate("price >= 10"), (Predicate{"price", 10, Op::ge, 0}));
  EXPECT_EQ(parse_predicate("  TS mod 3 4 "), (Predicate{"TS", 3, Op::mod, 4}));
  EXPECT_EQ(parse_predicate("TS < 9"), (Predicate{"TS", 8, Op::le, 0}));
  EXPECT_EQ(parse_predicate("TS gt 9"), (Predicate{"TS", 10, Op::ge, 0}));
  EXPECT_EQ(parse_predicate("stockId = 3"), (Predicate{"stockId", 3, Op::eq, 0}));
  EXPECT_THROW(parse_predicate("TS < 0"), PolicyError);
  EXPECT_THROW(parse_predicate("TS ~ 3"), PolicyError);
  EXPECT_THROW(parse_predicate("TS mod 3"), PolicyError);
  EXPECT_THROW(parse_predicate("TS ge x"), PolicyError);
}

TEST(Universe, CountMatchesConstructionRules) {
  const auto u = universe_for({{"A1", 8}, {"A2", 8}}, {2}, {2, 4});
  // Per attribute: 8 binary positions x 2 digits, dc, att=, join=. Windows 1, 2, 4.
  EXPECT_EQ(u.size(), 2u * (8 * 2 + 3) + 3);
  EXPECT_EQ(as_set(u).size(), u.size());
}

TEST(Universe, CoversEveryEmittedAttribute) {
  const std::vector<AttributeDomain> schema{{"TS", 10}, {"price", 8}};
  const auto u = as_set(universe_for(schema, {2, 3, 5}, {2, 8}));
  std::mt19937 gen(3);
  for (int i = 0; i < 200; ++i) {
    for (const auto& d : schema) {
      Encoding e;
      e.width = d.width;
      for (const auto& s : attr_set(d.name, gen() % (1u << d.width), e)) ASSERT_TRUE(u.count(s)) << s;
      ASSERT_TRUE(u.count(value_attr(d.name)));
    }
  }
  EXPECT_TRUE(u.count("window=1"));
  EXPECT_TRUE(u.count("window=8"));
}

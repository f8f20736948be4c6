#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cipherflow/abe/access_tree.hpp"

namespace cipherflow::policy {

using abe::AccessTree;

// Canonical encryption-attribute strings. Each family has a distinct prefix
// so the encodings are injective across families.
std::string bit_attr(std::string_view attr, unsigned base, unsigned pos, unsigned digit);  // att|A|b|i|d
std::string dont_care(std::string_view attr);                                             // dc|A
std::string value_attr(std::string_view attr);                                            // att=A
std::string window_attr(std::uint32_t ws);                                                // window=ws
std::string join_attr(std::string_view attr);                                             // join=J

constexpr unsigned kDefaultWidth = 8;
inline const std::vector<unsigned> kDefaultBases{2, 3, 5};

// Smallest m with base^m >= 2^width, so every width-bit value has m digits.
unsigned digit_count(unsigned base, unsigned width);

// Bit-level encoding parameters for one attribute domain [0, 2^width).
struct Encoding {
  std::vector<unsigned> bases = kDefaultBases;  // primes; 2 is required for eq/le/ge
  unsigned width = kDefaultWidth;

  std::uint64_t domain() const { return std::uint64_t{1} << width; }
};

// lambda(A, v, b): one attribute per base-b digit position of v.
std::vector<std::string> bag_of_bits(std::string_view attr, std::uint64_t v, unsigned base, unsigned width);
// AS(A, v): union of bag_of_bits over all bases plus the don't-care attribute.
std::vector<std::string> attr_set(std::string_view attr, std::uint64_t v, const Encoding& enc);

// v >= k and v <= k over the binary digits of k. `bits` holds k's binary
// digits least-significant first; `top` is the highest position considered.
// A subtree that is always true is the don't-care leaf.
AccessTree cond_ge(std::string_view attr, std::string_view bits, int top);
AccessTree cond_le(std::string_view attr, std::string_view bits, int top);

enum class Op { eq, le, ge, mod };

std::string_view op_name(Op op);

struct Predicate {
  std::string attribute;
  std::uint64_t constant = 0;
  Op op = Op::eq;
  std::uint64_t modulus = 0;  // op == mod only; v mod modulus == constant mod modulus

  bool holds(std::uint64_t v) const;
  std::string to_string() const;
  bool operator==(const Predicate&) const = default;
};

// D(A, k, op). Throws PolicyError when the predicate cannot be expressed
// under `enc` (constant outside the domain for eq/ge, a modulus factor
// outside the base set, or a prime power wider than the digit count).
AccessTree compile_predicate(const Predicate& pred, const Encoding& enc);

// Conjunction of the compiled predicates.
AccessTree compile_filter(const std::vector<Predicate>& preds, const Encoding& enc);

// "ATTR OP CONST [MOD]" where OP is one of eq = le <= ge >= lt < gt > mod.
// lt/gt are rewritten as le/ge on the adjacent constant.
// Throws PolicyError on malformed input.
Predicate parse_predicate(std::string_view line);

struct AttributeDomain {
  std::string name;
  unsigned width = kDefaultWidth;
};

// Every encryption attribute a stream with this schema can carry: bit and
// don't-care attributes per schema attribute, att=A and join=A per
// attribute, and window=ws for ws in `windows` plus window=1. Order is
// deterministic and duplicates are removed.
std::vector<std::string> universe_for(const std::vector<AttributeDomain>& schema, const std::vector<unsigned>& bases,
                                      const std::vector<std::uint32_t>& windows);

}  // namespace cipherflow::policy

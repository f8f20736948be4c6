#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "cipherflow/codec.hpp"

namespace cipherflow::abe {

using AttributeSet = std::set<std::string>;

// Threshold-gate tree over attribute leaves. A gate with threshold k is
// satisfied when at least k children are; AND gates use k = N, OR gates
// k = 1. Children are indexed 1..N, the Lagrange points used by KeyGen.
class AccessTree {
 public:
  static AccessTree leaf(std::string attribute);
  // Throws PolicyError unless 1 <= threshold <= children.size().
  static AccessTree gate(std::size_t threshold, std::vector<AccessTree> children);
  // A single child collapses to the child itself.
  static AccessTree all_of(std::vector<AccessTree> children);
  static AccessTree any_of(std::vector<AccessTree> children);

  bool is_leaf() const { return children_.empty(); }
  const std::string& attribute() const { return attribute_; }
  std::size_t threshold() const { return threshold_; }
  const std::vector<AccessTree>& children() const { return children_; }

  bool evaluate(const AttributeSet& attributes) const;
  std::size_t leaf_count() const;
  std::size_t depth() const;
  // Leaf attributes in depth-first order (the order of transform-key elements).
  std::vector<std::string> leaf_attributes() const;

  // e.g. and(a, or(b, c)), 2of3(a, b, c)
  std::string to_string() const;

  void write(ByteWriter& w) const;
  static AccessTree read(ByteReader& r);

  bool operator==(const AccessTree&) const = default;

 private:
  AccessTree() = default;

  std::string attribute_;
  std::size_t threshold_ = 0;
  std::vector<AccessTree> children_;
};

}  // namespace cipherflow::abe

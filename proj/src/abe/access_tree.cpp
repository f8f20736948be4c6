#include "cipherflow/abe/access_tree.hpp"

#include <algorithm>

#include "cipherflow/error.hpp"

namespace cipherflow::abe {
namespace {

constexpr std::uint8_t kLeafTag = 0;
constexpr std::uint8_t kGateTag = 1;
constexpr std::size_t kMaxReadDepth = 64;

AccessTree read_node(ByteReader& r, std::size_t depth) {
  if (depth > kMaxReadDepth) throw DecodeError("access tree nested too deeply");
  const auto tag = r.u8();
  if (tag == kLeafTag) return AccessTree::leaf(r.str());
  if (tag != kGateTag) throw DecodeError("unknown access tree node tag");
  const auto threshold = r.u16();
  const auto n = r.u16();
  std::vector<AccessTree> children;
  children.reserve(n);
  for (std::uint16_t i = 0; i < n; ++i) children.push_back(read_node(r, depth + 1));
  try {
    return AccessTree::gate(threshold, std::move(children));
  } catch (const PolicyError& e) {
    throw DecodeError(e.what());
  }
}

}  // namespace

AccessTree AccessTree::leaf(std::string attribute) {
  if (attribute.empty()) throw PolicyError("empty leaf attribute");
  AccessTree t;
  t.attribute_ = std::move(attribute);
  return t;
}

AccessTree AccessTree::gate(std::size_t threshold, std::vector<AccessTree> children) {
  if (children.empty()) throw PolicyError("gate without children");
  if (threshold == 0 || threshold > children.size())
    throw PolicyError("threshold " + std::to_string(threshold) + " invalid for " + std::to_string(children.size()) +
                      " children");
  AccessTree t;
  t.threshold_ = threshold;
  t.children_ = std::move(children);
  return t;
}

AccessTree AccessTree::all_of(std::vector<AccessTree> children) {
  if (children.size() == 1) return std::move(children.front());
  const auto n = children.size();
  return gate(n, std::move(children));
}

AccessTree AccessTree::any_of(std::vector<AccessTree> children) {
  if (children.size() == 1) return std::move(children.front());
  return gate(1, std::move(children));
}

bool AccessTree::evaluate(const AttributeSet& attributes) const {
  if (is_leaf()) return attributes.contains(attribute_);
  std::size_t satisfied = 0;
  for (const auto& c : children_) {
    if (c.evaluate(attributes) && ++satisfied >= threshold_) return true;
  }
  return false;
}

std::size_t AccessTree::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

std::size_t AccessTree::depth() const {
  std::size_t d = 0;
  for (const auto& c : children_) d = std::max(d, c.depth());
  return is_leaf() ? 0 : d + 1;
}

std::vector<std::string> AccessTree::leaf_attributes() const {
  std::vector<std::string> out;
  auto walk = [&out](const AccessTree& t, auto&& self) -> void {
    if (t.is_leaf()) {
      out.push_back(t.attribute_);
      return;
    }
    for (const auto& c : t.children_) self(c, self);
  };
  walk(*this, walk);
  return out;
}

std::string AccessTree::to_string() const {
  if (is_leaf()) return attribute_;
  std::string name;
  if (threshold_ == children_.size())
    name = "and";
  else if (threshold_ == 1)
    name = "or";
  else
    name = std::to_string(threshold_) + "of" + std::to_string(children_.size());
  std::string out = name + "(";
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i) out += ", ";
    out += children_[i].to_string();
  }
  return out + ")";
}

void AccessTree::write(ByteWriter& w) const {
  if (is_leaf()) {
    w.u8(kLeafTag);
    w.str(attribute_);
    return;
  }
  w.u8(kGateTag);
  w.u16(static_cast<std::uint16_t>(threshold_));
  w.u16(static_cast<std::uint16_t>(children_.size()));
  for (const auto& c : children_) c.write(w);
}

AccessTree AccessTree::read(ByteReader& r) { return read_node(r, 0); }

}  // namespace cipherflow::abe

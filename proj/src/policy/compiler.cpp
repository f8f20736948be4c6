#include "cipherflow/policy/compiler.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "cipherflow/error.hpp"

namespace cipherflow::policy {
namespace {

bool is_true_leaf(const AccessTree& t) { return t.is_leaf() && t.attribute().starts_with("dc|"); }

bool is_or(const AccessTree& t) { return !t.is_leaf() && t.threshold() == 1; }
bool is_and(const AccessTree& t) { return !t.is_leaf() && t.threshold() == t.children().size(); }

// Binary gates absorb same-kind children so that chains become one wide
// gate: OR chains then need no Lagrange exponentiation at transform time.
AccessTree either(AccessTree head, AccessTree rest) {
  std::vector<AccessTree> kids{std::move(head)};
  if (is_or(rest)) {
    for (const auto& c : rest.children()) kids.push_back(c);
  } else {
    kids.push_back(std::move(rest));
  }
  return AccessTree::any_of(std::move(kids));
}

AccessTree both(AccessTree head, AccessTree rest) {
  std::vector<AccessTree> kids{std::move(head)};
  if (is_and(rest)) {
    for (const auto& c : rest.children()) kids.push_back(c);
  } else {
    kids.push_back(std::move(rest));
  }
  return AccessTree::all_of(std::move(kids));
}

std::string binary_digits(std::uint64_t k, unsigned width) {
  std::string bits(width, '0');
  for (unsigned i = 0; i < width; ++i) bits[i] = ((k >> i) & 1) ? '1' : '0';
  return bits;
}

std::vector<std::pair<unsigned, unsigned>> factor(std::uint64_t m) {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (std::uint64_t q = 2; q * q <= m; ++q) {
    unsigned t = 0;
    while (m % q == 0) {
      m /= q;
      ++t;
    }
    if (t) out.emplace_back(static_cast<unsigned>(q), t);
  }
  if (m > 1) out.emplace_back(static_cast<unsigned>(m), 1);
  return out;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw PolicyError("bad " + std::string(what) + ": " + std::string(s));
  return v;
}

}  // namespace

std::string bit_attr(std::string_view attr, unsigned base, unsigned pos, unsigned digit) {
  std::ostringstream os;
  os << "att|" << attr << '|' << base << '|' << pos << '|' << digit;
  return os.str();
}

std::string dont_care(std::string_view attr) { return "dc|" + std::string(attr); }
std::string value_attr(std::string_view attr) { return "att=" + std::string(attr); }
std::string window_attr(std::uint32_t ws) { return "window=" + std::to_string(ws); }
std::string join_attr(std::string_view attr) { return "join=" + std::string(attr); }

unsigned digit_count(unsigned base, unsigned width) {
  if (base < 2) throw PolicyError("base must be at least 2");
  if (width == 0 || width > 32) throw PolicyError("domain width must be in [1, 32]");
  const std::uint64_t need = std::uint64_t{1} << width;
  unsigned m = 0;
  for (std::uint64_t p = 1; p < need; p *= base) ++m;
  return m;
}

std::vector<std::string> bag_of_bits(std::string_view attr, std::uint64_t v, unsigned base, unsigned width) {
  if (width < 64 && v >> width) throw DomainError("value outside attribute domain");
  const unsigned m = digit_count(base, width);
  std::vector<std::string> out;
  out.reserve(m);
  for (unsigned i = 0; i < m; ++i) {
    out.push_back(bit_attr(attr, base, i, static_cast<unsigned>(v % base)));
    v /= base;
  }
  return out;
}

std::vector<std::string> attr_set(std::string_view attr, std::uint64_t v, const Encoding& enc) {
  if (enc.bases.empty()) throw PolicyError("empty base set");
  std::vector<std::string> out;
  for (auto b : enc.bases) {
    auto bits = bag_of_bits(attr, v, b, enc.width);
    out.insert(out.end(), bits.begin(), bits.end());
  }
  out.push_back(dont_care(attr));
  return out;
}

AccessTree cond_ge(std::string_view attr, std::string_view bits, int top) {
  if (top < 0) return AccessTree::leaf(dont_care(attr));
  auto rest = cond_ge(attr, bits, top - 1);
  auto one = AccessTree::leaf(bit_attr(attr, 2, static_cast<unsigned>(top), 1));
  if (bits.at(static_cast<std::size_t>(top)) == '0') {
    // v_top = 1 already exceeds k on the remaining positions.
    return is_true_leaf(rest) ? rest : either(std::move(one), std::move(rest));
  }
  return is_true_leaf(rest) ? one : both(std::move(one), std::move(rest));
}

AccessTree cond_le(std::string_view attr, std::string_view bits, int top) {
  if (top < 0) return AccessTree::leaf(dont_care(attr));
  auto rest = cond_le(attr, bits, top - 1);
  auto zero = AccessTree::leaf(bit_attr(attr, 2, static_cast<unsigned>(top), 0));
  if (bits.at(static_cast<std::size_t>(top)) == '0') {
    return is_true_leaf(rest) ? zero : both(std::move(zero), std::move(rest));
  }
  return is_true_leaf(rest) ? rest : either(std::move(zero), std::move(rest));
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::eq: return "eq";
    case Op::le: return "le";
    case Op::ge: return "ge";
    case Op::mod: return "mod";
  }
  return "?";
}

bool Predicate::holds(std::uint64_t v) const {
  switch (op) {
    case Op::eq: return v == constant;
    case Op::le: return v <= constant;
    case Op::ge: return v >= constant;
    case Op::mod: return modulus != 0 && v % modulus == constant % modulus;
  }
  return false;
}

std::string Predicate::to_string() const {
  std::string s = attribute + " " + std::string(op_name(op)) + " " + std::to_string(constant);
  if (op == Op::mod) s += " " + std::to_string(modulus);
  return s;
}

AccessTree compile_predicate(const Predicate& pred, const Encoding& enc) {
  const auto& a = pred.attribute;
  const std::uint64_t domain = enc.domain();
  const bool binary = std::find(enc.bases.begin(), enc.bases.end(), 2u) != enc.bases.end();
  if (pred.op != Op::mod && !binary) throw PolicyError("comparison predicates need base 2 in the base set");

  switch (pred.op) {
    case Op::eq: {
      if (pred.constant >= domain) throw PolicyError("eq constant outside domain: " + pred.to_string());
      std::vector<AccessTree> leaves;
      for (auto& s : bag_of_bits(a, pred.constant, 2, enc.width)) leaves.push_back(AccessTree::leaf(std::move(s)));
      return AccessTree::all_of(std::move(leaves));
    }
    case Op::ge: {
      if (pred.constant >= domain) throw PolicyError("ge constant outside domain: " + pred.to_string());
      return cond_ge(a, binary_digits(pred.constant, enc.width), static_cast<int>(enc.width) - 1);
    }
    case Op::le: {
      const auto k = std::min(pred.constant, domain - 1);
      return cond_le(a, binary_digits(k, enc.width), static_cast<int>(enc.width) - 1);
    }
    case Op::mod: {
      if (pred.modulus < 2) throw PolicyError("modulus must be at least 2");
      const auto residue = pred.constant % pred.modulus;
      std::vector<AccessTree> leaves;
      for (auto [q, t] : factor(pred.modulus)) {
        if (std::find(enc.bases.begin(), enc.bases.end(), q) == enc.bases.end())
          throw PolicyError("modulus factor " + std::to_string(q) + " outside base set");
        if (t > digit_count(q, enc.width))
          throw PolicyError("modulus power " + std::to_string(q) + "^" + std::to_string(t) + " exceeds digit count");
        std::uint64_t qt = 1;
        for (unsigned i = 0; i < t; ++i) qt *= q;
        auto r = residue % qt;
        for (unsigned i = 0; i < t; ++i) {
          leaves.push_back(AccessTree::leaf(bit_attr(a, q, i, static_cast<unsigned>(r % q))));
          r /= q;
        }
      }
      return AccessTree::all_of(std::move(leaves));
    }
  }
  throw PolicyError("unknown predicate op");
}

AccessTree compile_filter(const std::vector<Predicate>& preds, const Encoding& enc) {
  if (preds.empty()) throw PolicyError("empty filter");
  std::vector<AccessTree> parts;
  for (const auto& p : preds) parts.push_back(compile_predicate(p, enc));
  return AccessTree::all_of(std::move(parts));
}

Predicate parse_predicate(std::string_view line) {
  std::istringstream is{std::string(line)};
  std::vector<std::string> tok;
  for (std::string t; is >> t;) tok.push_back(t);
  if (tok.size() < 3) throw PolicyError("predicate needs ATTR OP CONST: " + std::string(line));

  Predicate p;
  p.attribute = tok[0];
  p.constant = parse_u64(tok[2], "constant");
  const auto& op = tok[1];
  const std::size_t expected = op == "mod" ? 4 : 3;
  if (tok.size() != expected) throw PolicyError("wrong token count in predicate: " + std::string(line));

  if (op == "eq" || op == "=" || op == "==") {
    p.op = Op::eq;
  } else if (op == "le" || op == "<=") {
    p.op = Op::le;
  } else if (op == "ge" || op == ">=") {
    p.op = Op::ge;
  } else if (op == "lt" || op == "<") {
    if (p.constant == 0) throw PolicyError("predicate is never true: " + std::string(line));
    p.op = Op::le;
    --p.constant;
  } else if (op == "gt" || op == ">") {
    p.op = Op::ge;
    ++p.constant;
  } else if (op == "mod") {
    p.op = Op::mod;
    p.modulus = parse_u64(tok[3], "modulus");
    if (p.modulus < 2) throw PolicyError("modulus must be at least 2");
  } else {
    throw PolicyError("unknown predicate op: " + op);
  }
  return p;
}

std::vector<std::string> universe_for(const std::vector<AttributeDomain>& schema, const std::vector<unsigned>& bases,
                                      const std::vector<std::uint32_t>& windows) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](std::string s) {
    if (seen.insert(s).second) out.push_back(std::move(s));
  };
  for (const auto& a : schema) {
    for (auto b : bases) {
      const auto m = digit_count(b, a.width);
      for (unsigned i = 0; i < m; ++i)
        for (unsigned d = 0; d < b; ++d) add(bit_attr(a.name, b, i, d));
    }
    add(dont_care(a.name));
    add(value_attr(a.name));
    add(join_attr(a.name));
  }
  std::set<std::uint32_t> ws(windows.begin(), windows.end());
  ws.insert(1);
  for (auto w : ws) add(window_attr(w));
  return out;
}

}  // namespace cipherflow::policy

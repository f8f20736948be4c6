#include "cipherflow/operators/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "cipherflow/error.hpp"

namespace cipherflow::ops {
namespace {

std::uint64_t to_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DecodeError("bad " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
bool contains(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

void write_strings(ByteWriter& w, const std::vector<std::string>& v) {
  w.u16(static_cast<std::uint16_t>(v.size()));
  for (const auto& s : v) w.str(s);
}

std::vector<std::string> read_strings(ByteReader& r) {
  std::vector<std::string> v(r.u16());
  for (auto& s : v) s = r.str();
  return v;
}

void write_preds(ByteWriter& w, const std::vector<policy::Predicate>& preds) {
  w.u16(static_cast<std::uint16_t>(preds.size()));
  for (const auto& p : preds) {
    w.str(p.attribute);
    w.u8(static_cast<std::uint8_t>(p.op));
    w.u64(p.constant);
    w.u64(p.modulus);
  }
}

std::vector<policy::Predicate> read_preds(ByteReader& r) {
  std::vector<policy::Predicate> preds(r.u16());
  for (auto& p : preds) {
    p.attribute = r.str();
    const auto op = r.u8();
    if (op > static_cast<std::uint8_t>(policy::Op::mod)) throw DecodeError("unknown predicate op");
    p.op = static_cast<policy::Op>(op);
    p.constant = r.u64();
    p.modulus = r.u64();
  }
  return preds;
}

// ws = prod q_i^t_i with every q_i in the base set and t_i within the TS digit count.
bool smooth_window(std::uint32_t ws, const StreamConfig& s) {
  if (ws < 2) return false;
  try {
    policy::Encoding e = s.encoding_of(kTs);
    policy::compile_predicate({kTs, 0, policy::Op::mod, ws}, e);
    return true;
  } catch (const PolicyError&) {
    return false;
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw PolicyError(msg);
}

}  // namespace

// ---- DataTuple ----

std::uint64_t DataTuple::value(std::string_view name) const {
  if (name == kTs) return ts;
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw DomainError("tuple has no attribute " + std::string(name));
}

std::string DataTuple::to_string() const {
  std::string s = std::to_string(ts);
  for (const auto& [k, v] : values) s += "," + k + "=" + std::to_string(v);
  return s;
}

DataTuple DataTuple::parse(std::string_view line) {
  const auto parts = split(trim(line), ',');
  if (parts.empty() || parts[0].empty()) throw DecodeError("empty tuple record");
  DataTuple t;
  auto head = trim(parts[0]);
  if (head.starts_with("ts=")) head.remove_prefix(3);
  t.ts = to_u64(head, "timestamp");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto kv = split(trim(parts[i]), '=');
    if (kv.size() != 2 || kv[0].empty()) throw DecodeError("bad field '" + std::string(parts[i]) + "'");
    t.values.emplace_back(std::string(kv[0]), to_u64(kv[1], "value"));
  }
  return t;
}

Bytes DataTuple::to_bytes() const {
  ByteWriter w;
  w.u64(ts);
  w.u16(static_cast<std::uint16_t>(values.size()));
  for (const auto& [k, v] : values) {
    w.str(k);
    w.u64(v);
  }
  return std::move(w).bytes();
}

DataTuple DataTuple::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  DataTuple t;
  t.ts = r.u64();
  const auto n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    auto k = r.str();
    t.values.emplace_back(std::move(k), r.u64());
  }
  r.expect_done();
  return t;
}

// ---- PlainRecord ----

std::uint64_t PlainRecord::field(std::string_view name) const {
  for (const auto& [k, v] : fields)
    if (k == name) return v;
  throw DomainError("record has no field " + std::string(name));
}

std::string PlainRecord::to_string() const {
  std::string s;
  for (const auto& [k, v] : fields) {
    if (!s.empty()) s += ',';
    s += k + "=" + std::to_string(v);
  }
  return s;
}

// ---- StreamConfig ----

bool StreamConfig::has_attr(std::string_view name) const {
  if (name == kTs) return true;
  return std::any_of(schema.begin(), schema.end(), [&](const auto& d) { return d.name == name; });
}

unsigned StreamConfig::width_of(std::string_view name) const {
  if (name == kTs) return ts_width;
  for (const auto& d : schema)
    if (d.name == name) return d.width;
  throw PolicyError("stream " + id + " has no attribute " + std::string(name));
}

policy::Encoding StreamConfig::encoding_of(std::string_view name) const {
  policy::Encoding e;
  e.bases = bases;
  e.width = width_of(name);
  return e;
}

std::vector<std::string> StreamConfig::universe() const {
  auto domains = schema;
  domains.push_back({kTs, ts_width});
  auto u = policy::universe_for(domains, bases, windows);
  u.push_back(tuple_attr());
  for (const auto& a : agg_attrs) {
    u.push_back(masked_attr(a));
    u.push_back(cumulative_attr(a));
  }
  return u;
}

void StreamConfig::validate() const {
  require(!id.empty(), "stream id is empty");
  require(!schema.empty(), "stream schema is empty");
  std::set<std::string> names;
  for (const auto& d : schema) {
    require(d.name != kTs, "TS is implicit and must not appear in the schema");
    require(!d.name.empty() && d.name.find_first_of("|=:, \t") == std::string::npos,
            "bad attribute name '" + d.name + "'");
    require(names.insert(d.name).second, "duplicate attribute " + d.name);
    require(d.width >= 1 && d.width <= 16, "attribute width must be in [1, 16]: " + d.name);
  }
  require(ts_width >= 1 && ts_width <= 32, "TS width must be in [1, 32]");
  require(!bases.empty(), "empty base set");
  for (auto b : bases) {
    bool prime = b >= 2;
    for (unsigned d = 2; d * d <= b; ++d) prime = prime && b % d != 0;
    require(prime, "base " + std::to_string(b) + " is not prime");
  }
  for (const auto& a : filter_attrs) require(has_attr(a), "filter attribute not in schema: " + a);
  for (const auto& a : agg_attrs) require(a != kTs && has_attr(a), "aggregate attribute not in schema: " + a);
  for (const auto& a : join_attrs) require(a != kTs && has_attr(a), "join attribute not in schema: " + a);
  for (auto ws : windows) require(ws >= 1 && ws <= 0xffff, "window size out of range");
  require(!(enc.filter || enc.map_filter) || !filter_attrs.empty(), "filter encodings need filter attributes");
  require(!(enc.agg1 || enc.agg2 || enc.agg3) || !agg_attrs.empty(), "aggregate encodings need aggregate attributes");
  require(!(enc.agg1 || enc.agg2) || !windows.empty(), "Agg-1/Agg-2 need a window-size set");
  require(!enc.join || !join_attrs.empty(), "join encoding needs join attributes");
  if (enc.agg3)
    for (const auto& a : agg_attrs) require(agg3_offsets.count(a), "missing Agg-3 offset for " + a);
  for (const auto& a : join_attrs) require(width_of(a) <= 64 && (std::uint64_t{1} << width_of(a)) <= join_domain, "join attribute wider than the det domain");
}

void StreamConfig::write(ByteWriter& w) const {
  w.str(id);
  w.u16(static_cast<std::uint16_t>(schema.size()));
  for (const auto& d : schema) {
    w.str(d.name);
    w.u8(static_cast<std::uint8_t>(d.width));
  }
  w.u8(static_cast<std::uint8_t>(ts_width));
  w.u8(static_cast<std::uint8_t>(bases.size()));
  for (auto b : bases) w.u16(static_cast<std::uint16_t>(b));
  write_strings(w, filter_attrs);
  w.u16(static_cast<std::uint16_t>(windows.size()));
  for (auto ws : windows) w.u32(ws);
  write_strings(w, agg_attrs);
  write_strings(w, join_attrs);
  w.u64(join_domain);
  std::uint8_t flags = 0;
  const bool bits[] = {enc.map, enc.filter, enc.map_filter, enc.join, enc.agg1, enc.agg2, enc.agg3};
  for (int i = 0; i < 7; ++i) flags |= static_cast<std::uint8_t>(bits[i]) << i;
  w.u8(flags);
  w.u16(static_cast<std::uint16_t>(agg3_offsets.size()));
  for (const auto& [a, s] : agg3_offsets) {
    w.str(a);
    w.raw(s.to_bytes());
  }
}

StreamConfig StreamConfig::read(ByteReader& r) {
  StreamConfig c;
  c.id = r.str();
  c.schema.resize(r.u16());
  for (auto& d : c.schema) {
    d.name = r.str();
    d.width = r.u8();
  }
  c.ts_width = r.u8();
  c.bases.resize(r.u8());
  for (auto& b : c.bases) b = r.u16();
  c.filter_attrs = read_strings(r);
  c.windows.resize(r.u16());
  for (auto& ws : c.windows) ws = r.u32();
  c.agg_attrs = read_strings(r);
  c.join_attrs = read_strings(r);
  c.join_domain = r.u64();
  const auto flags = r.u8();
  bool* bits[] = {&c.enc.map, &c.enc.filter, &c.enc.map_filter, &c.enc.join, &c.enc.agg1, &c.enc.agg2, &c.enc.agg3};
  for (int i = 0; i < 7; ++i) *bits[i] = flags >> i & 1;
  const auto n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    auto a = r.str();
    c.agg3_offsets[a] = Scalar::from_bytes(r.raw(Scalar::kBytes));
  }
  try {
    c.validate();
  } catch (const PolicyError& e) {
    throw DecodeError(std::string("invalid stream config: ") + e.what());
  }
  return c;
}

// ---- OperatorPolicy ----

std::string_view kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::map: return "map";
    case OperatorKind::filter: return "filter";
    case OperatorKind::join: return "join";
    case OperatorKind::agg1: return "agg1";
    case OperatorKind::agg2: return "agg2";
    case OperatorKind::agg3: return "agg3";
    case OperatorKind::map_filter: return "map-filter";
    case OperatorKind::map_filter_join: return "map-filter-join";
    case OperatorKind::filter_agg: return "filter-agg";
  }
  return "?";
}

OperatorKind parse_kind(std::string_view s) {
  for (int k = 1; k <= 9; ++k)
    if (kind_name(static_cast<OperatorKind>(k)) == s) return static_cast<OperatorKind>(k);
  throw PolicyError("unknown operator kind: " + std::string(s));
}

bool is_join(OperatorKind k) { return k == OperatorKind::join || k == OperatorKind::map_filter_join; }

OperatorPolicy OperatorPolicy::parse(std::string_view text) {
  OperatorPolicy p;
  bool have_kind = false;
  std::istringstream in{std::string(text)};
  auto u64 = [](const std::string& s, const char* what) {
    try {
      return to_u64(s, what);
    } catch (const DecodeError& e) {
      throw PolicyError(e.what());
    }
  };
  for (std::string raw; std::getline(in, raw);) {
    auto line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::istringstream ls{std::string(line)};
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    const auto& d = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n) throw PolicyError("wrong argument count: " + std::string(line));
    };
    if (d == "policy") {
      need(2);
      p.id = static_cast<std::uint32_t>(u64(tok[1], "policy id"));
    } else if (d == "kind") {
      need(2);
      p.kind = parse_kind(tok[1]);
      have_kind = true;
    } else if (d == "stream") {
      need(2);
      p.stream = tok[1];
    } else if (d == "stream2") {
      need(2);
      p.stream2 = tok[1];
    } else if (d == "map") {
      if (tok.size() < 2) throw PolicyError("map needs attributes");
      p.map_attrs.insert(p.map_attrs.end(), tok.begin() + 1, tok.end());
    } else if (d == "join") {
      need(2);
      p.join_attr = tok[1];
    } else if (d == "buffers") {
      need(3);
      p.buffer1 = static_cast<std::uint32_t>(u64(tok[1], "buffer"));
      p.buffer2 = static_cast<std::uint32_t>(u64(tok[2], "buffer"));
    } else if (d == "aggregate") {
      need(2);
      p.agg_attr = tok[1];
    } else if (d == "window") {
      need(2);
      p.ws = static_cast<std::uint32_t>(u64(tok[1], "window"));
    } else if (d == "start") {
      need(2);
      p.start = u64(tok[1], "start");
    } else if (d == "variant") {
      need(2);
      p.agg_variant = static_cast<std::uint8_t>(u64(tok[1], "variant"));
    } else if (d == "where2") {
      p.filters2.push_back(policy::parse_predicate(line.substr(6)));
    } else {
      p.filters.push_back(policy::parse_predicate(line));
    }
  }
  if (!have_kind) throw PolicyError("policy text has no kind line");
  if (p.kind == OperatorKind::filter_agg && !p.filters.empty()) {
    // The only supported filter shape is TS >= x; it sets the start.
    if (p.filters.size() != 1 || p.filters[0].attribute != kTs || p.filters[0].op != policy::Op::ge)
      throw PolicyError("filter-agg supports a single 'TS >= x' predicate");
    p.start = p.filters[0].constant;
    p.filters.clear();
  }
  return p;
}

std::string OperatorPolicy::to_text() const {
  std::ostringstream os;
  os << "policy " << id << "\nkind " << kind_name(kind) << "\nstream " << stream << "\n";
  if (!stream2.empty()) os << "stream2 " << stream2 << "\n";
  if (!map_attrs.empty()) {
    os << "map";
    for (const auto& a : map_attrs) os << " " << a;
    os << "\n";
  }
  if (!join_attr.empty()) os << "join " << join_attr << "\nbuffers " << buffer1 << " " << buffer2 << "\n";
  if (!agg_attr.empty()) os << "aggregate " << agg_attr << "\nwindow " << ws << "\n";
  if (kind == OperatorKind::filter_agg) os << "start " << start << "\nvariant " << int(agg_variant) << "\n";
  for (const auto& f : filters) os << f.to_string() << "\n";
  for (const auto& f : filters2) os << "where2 " << f.to_string() << "\n";
  return os.str();
}

void OperatorPolicy::validate(const StreamConfig& s1, const StreamConfig* s2) const {
  require(s1.id == stream, "policy stream does not match registration");
  const bool joins = is_join(kind);
  require(joins == (s2 != nullptr), joins ? "join policy needs a second stream" : "unexpected second stream");
  if (joins) require(s2->id == stream2, "policy stream2 does not match registration");

  auto check_filters = [&](const std::vector<policy::Predicate>& fs, const StreamConfig& s) {
    require(!fs.empty(), "policy needs at least one filter predicate");
    for (const auto& f : fs) {
      require(contains(s.filter_attrs, f.attribute), "predicate attribute not declared filterable: " + f.attribute);
      policy::compile_predicate(f, s.encoding_of(f.attribute));
    }
  };
  auto check_map = [&](const StreamConfig& s) {
    require(!map_attrs.empty(), "map policy needs attributes");
    std::set<std::string> seen;
    for (const auto& a : map_attrs) {
      require(a != kTs && s.has_attr(a), "map attribute not in schema: " + a);
      require(seen.insert(a).second, "duplicate map attribute " + a);
    }
  };
  auto check_agg_attr = [&]() {
    require(contains(s1.agg_attrs, agg_attr), "attribute not declared aggregatable: " + agg_attr);
    require(ws >= 1, "window size must be positive");
  };

  switch (kind) {
    case OperatorKind::map:
      require(s1.enc.map, "stream does not emit map components");
      check_map(s1);
      break;
    case OperatorKind::filter:
      require(s1.enc.filter, "stream does not emit filter components");
      check_filters(filters, s1);
      break;
    case OperatorKind::map_filter:
      require(s1.enc.map_filter, "stream does not emit map-filter components");
      check_map(s1);
      check_filters(filters, s1);
      break;
    case OperatorKind::join:
    case OperatorKind::map_filter_join:
      for (const auto* s : {&s1, s2}) {
        require(contains(s->join_attrs, join_attr), "join attribute not declared on " + s->id);
        require(s->enc.join, "stream does not emit join components: " + s->id);
      }
      require(s1.join_domain == s2->join_domain, "join domains differ");
      require(buffer1 >= 1 && buffer2 >= 1, "join buffers must be positive");
      if (kind == OperatorKind::map_filter_join) {
        for (int side = 0; side < 2; ++side) {
          const auto& s = side ? *s2 : s1;
          require(s.enc.map_filter, "stream does not emit map-filter components: " + s.id);
          check_map(s);
          check_filters(filters_for(side), s);
        }
      }
      break;
    case OperatorKind::agg1:
    case OperatorKind::agg2:
      check_agg_attr();
      require(kind == OperatorKind::agg1 ? s1.enc.agg1 : s1.enc.agg2, "stream does not emit this aggregate encoding");
      require(ws == 1 || contains(s1.windows, ws), "window size not in the stream's window set");
      break;
    case OperatorKind::agg3:
      check_agg_attr();
      require(s1.enc.agg3, "stream does not emit Agg-3 components");
      require(ws == 1 || smooth_window(ws, s1), "window size is not smooth over the base set");
      break;
    case OperatorKind::filter_agg:
      check_agg_attr();
      require(ws >= 2, "filter-agg needs ws >= 2");
      require(agg_variant == 2 || agg_variant == 3, "filter-agg variant must be 2 or 3");
      require(start + ws <= (std::uint64_t{1} << s1.ts_width), "start outside the TS domain");
      if (agg_variant == 2) {
        require(s1.enc.agg2 && contains(s1.windows, ws), "Agg-2 window not available");
      } else {
        require(s1.enc.agg3 && smooth_window(ws, s1), "Agg-3 window not available");
      }
      break;
  }
}

void OperatorPolicy::write(ByteWriter& w) const {
  w.u32(id);
  w.u8(static_cast<std::uint8_t>(kind));
  w.str(stream);
  w.str(stream2);
  write_strings(w, map_attrs);
  write_preds(w, filters);
  write_preds(w, filters2);
  w.str(join_attr);
  w.u32(buffer1);
  w.u32(buffer2);
  w.str(agg_attr);
  w.u32(ws);
  w.u64(start);
  w.u8(agg_variant);
}

OperatorPolicy OperatorPolicy::read(ByteReader& r) {
  OperatorPolicy p;
  p.id = r.u32();
  const auto k = r.u8();
  if (k < 1 || k > 9) throw DecodeError("unknown operator kind");
  p.kind = static_cast<OperatorKind>(k);
  p.stream = r.str();
  p.stream2 = r.str();
  p.map_attrs = read_strings(r);
  p.filters = read_preds(r);
  p.filters2 = read_preds(r);
  p.join_attr = r.str();
  p.buffer1 = r.u32();
  p.buffer2 = r.u32();
  p.agg_attr = r.str();
  p.ws = r.u32();
  p.start = r.u64();
  p.agg_variant = r.u8();
  return p;
}

// ---- wire records ----

const SecureComponent* SecureTuple::find(std::string_view label) const {
  for (const auto& c : components)
    if (c.label == label) return &c;
  return nullptr;
}

const abe::AbeCiphertext* SecureTuple::abe(std::string_view label) const {
  const auto* c = find(label);
  return c ? std::get_if<abe::AbeCiphertext>(&c->body) : nullptr;
}

const abe::HybridCiphertext* SecureTuple::hybrid(std::string_view label) const {
  const auto* c = find(label);
  return c ? std::get_if<abe::HybridCiphertext>(&c->body) : nullptr;
}

const det::DetCiphertext* SecureTuple::det(std::string_view label) const {
  const auto* c = find(label);
  return c ? std::get_if<det::DetCiphertext>(&c->body) : nullptr;
}

Bytes SecureTuple::to_bytes() const {
  ByteWriter w;
  w.u64(ts);
  w.u16(static_cast<std::uint16_t>(hints.size()));
  for (const auto& [k, v] : hints) {
    w.str(k);
    w.u64(v);
  }
  w.u16(static_cast<std::uint16_t>(components.size()));
  for (const auto& c : components) {
    w.str(c.label);
    if (const auto* a = std::get_if<abe::AbeCiphertext>(&c.body)) {
      w.u8(static_cast<std::uint8_t>(ComponentType::abe));
      a->write(w);
    } else if (const auto* h = std::get_if<abe::HybridCiphertext>(&c.body)) {
      w.u8(static_cast<std::uint8_t>(ComponentType::hybrid));
      h->write(w);
    } else {
      w.u8(static_cast<std::uint8_t>(ComponentType::det));
      w.raw(std::get<det::DetCiphertext>(c.body).to_bytes());
    }
  }
  return std::move(w).bytes();
}

SecureTuple SecureTuple::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  SecureTuple t;
  t.ts = r.u64();
  const auto nh = r.u16();
  for (std::uint16_t i = 0; i < nh; ++i) {
    auto k = r.str();
    t.hints.emplace_back(std::move(k), r.u64());
  }
  const auto nc = r.u16();
  std::set<std::string> labels;
  for (std::uint16_t i = 0; i < nc; ++i) {
    SecureComponent c;
    c.label = r.str();
    if (!labels.insert(c.label).second) throw DecodeError("duplicate component label " + c.label);
    switch (static_cast<ComponentType>(r.u8())) {
      case ComponentType::abe: c.body = abe::AbeCiphertext::read(r); break;
      case ComponentType::hybrid: c.body = abe::HybridCiphertext::read(r); break;
      case ComponentType::det: c.body = det::DetCiphertext::from_bytes(r.raw(algebra::G1::kBytes)); break;
      default: throw DecodeError("unknown component type");
    }
    t.components.push_back(std::move(c));
  }
  r.expect_done();
  return t;
}

const OutputItem* OutputRecord::find(std::string_view label) const {
  for (const auto& i : items)
    if (i.label == label) return &i;
  return nullptr;
}

Bytes OutputRecord::to_bytes() const {
  ByteWriter w;
  w.u32(policy_id);
  w.u8(static_cast<std::uint8_t>(ts.size()));
  for (auto t : ts) w.u64(t);
  w.u16(static_cast<std::uint16_t>(items.size()));
  for (const auto& i : items) {
    w.str(i.label);
    if (const auto* t = std::get_if<abe::TransformedCiphertext>(&i.body)) {
      w.u8(1);
      t->write(w);
    } else {
      w.u8(2);
      std::get<abe::TransformedHybrid>(i.body).write(w);
    }
  }
  return std::move(w).bytes();
}

OutputRecord OutputRecord::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  OutputRecord o;
  o.policy_id = r.u32();
  o.ts.resize(r.u8());
  for (auto& t : o.ts) t = r.u64();
  const auto n = r.u16();
  for (std::uint16_t k = 0; k < n; ++k) {
    OutputItem i;
    i.label = r.str();
    const auto type = r.u8();
    if (type == 1) {
      i.body = abe::TransformedCiphertext::read(r);
    } else if (type == 2) {
      i.body = abe::TransformedHybrid::read(r);
    } else {
      throw DecodeError("unknown output item type");
    }
    o.items.push_back(std::move(i));
  }
  r.expect_done();
  return o;
}

std::string map_label(std::string_view a) { return "map:" + std::string(a); }
std::string mf_label(std::string_view a) { return "mf:" + std::string(a); }
std::string join_label(std::string_view j) { return "join:" + std::string(j); }
std::string det_label(std::string_view j) { return "det:" + std::string(j); }
std::string w1_label(std::string_view a) { return "w1:" + std::string(a); }
std::string agg1_label(std::string_view a, std::uint32_t ws) { return "agg1:" + std::string(a) + ":" + std::to_string(ws); }
std::string agg2_label(std::string_view a, std::uint32_t ws) { return "agg2:" + std::string(a) + ":" + std::to_string(ws); }
std::string agg3u_label(std::string_view a) { return "agg3u:" + std::string(a); }
std::string agg3v_label(std::string_view a) { return "agg3v:" + std::string(a); }

std::string tuple_attr() { return "tuple"; }
std::string masked_attr(std::string_view a) { return "agg=" + std::string(a); }
std::string cumulative_attr(std::string_view a) { return "cum=" + std::string(a); }

}  // namespace cipherflow::ops

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cipherflow/abe/proxy_abe.hpp"
#include "cipherflow/codec.hpp"
#include "cipherflow/det/det_cipher.hpp"
#include "cipherflow/policy/compiler.hpp"

namespace cipherflow::ops {

using algebra::Gt;
using algebra::Scalar;

inline constexpr const char* kTs = "TS";

// One plaintext stream element. `values` follows the stream schema order.
struct DataTuple {
  std::uint64_t ts = 0;
  std::vector<std::pair<std::string, std::uint64_t>> values;

  std::uint64_t value(std::string_view name) const;  // TS resolves to ts; throws DomainError
  // "ts,attr=value,..."
  std::string to_string() const;
  static DataTuple parse(std::string_view line);  // throws DecodeError
  Bytes to_bytes() const;
  static DataTuple from_bytes(std::span<const std::uint8_t> bytes);
  bool operator==(const DataTuple&) const = default;
};

// Decrypted (or reference) output record: ordered integer fields.
struct PlainRecord {
  std::vector<std::pair<std::string, std::uint64_t>> fields;

  std::uint64_t field(std::string_view name) const;
  std::string to_string() const;  // "k=v,k=v"
  bool operator==(const PlainRecord&) const = default;
};

// Which ciphertext families the owner emits for every tuple.
struct Encodings {
  bool map = false;         // map:A per attribute
  bool filter = false;      // filter (whole tuple under the FA bag-of-bits)
  bool map_filter = false;  // mf:A per attribute
  bool join = false;        // join:J hybrid payload + det:J token per join attribute
  bool agg1 = false;        // agg1:A:ws per aggregate attribute and W
  bool agg2 = false;        // agg2:A:ws at window boundaries
  bool agg3 = false;        // agg3u:A and agg3v:A
  bool operator==(const Encodings&) const = default;
};

// Public description of a stream, shared by owner, cloud and users.
struct StreamConfig {
  std::string id;
  std::vector<policy::AttributeDomain> schema;  // excludes TS
  unsigned ts_width = 16;
  std::vector<unsigned> bases = policy::kDefaultBases;
  std::vector<std::string> filter_attrs;  // may include TS
  std::vector<std::uint32_t> windows;     // W for Agg-1/Agg-2
  std::vector<std::string> agg_attrs;
  std::vector<std::string> join_attrs;
  std::uint64_t join_domain = det::kDefaultMessageDomain;
  Encodings enc;
  // Public offset of the Agg-3 cumulative mask, per aggregate attribute.
  std::map<std::string, Scalar> agg3_offsets;

  bool has_attr(std::string_view name) const;  // schema or TS
  unsigned width_of(std::string_view name) const;
  policy::Encoding encoding_of(std::string_view name) const;
  // Contiguous timestamps from 0 are required once any window encoding is on.
  bool needs_contiguous_ts() const { return enc.agg1 || enc.agg2 || enc.agg3; }
  // Compiler families for schema + TS, plus the operator families.
  std::vector<std::string> universe() const;
  // Throws PolicyError on inconsistent declarations.
  void validate() const;

  void write(ByteWriter& w) const;
  static StreamConfig read(ByteReader& r);
};

enum class OperatorKind : std::uint8_t {
  map = 1,
  filter = 2,
  join = 3,
  agg1 = 4,
  agg2 = 5,
  agg3 = 6,
  map_filter = 7,
  map_filter_join = 8,
  filter_agg = 9,
};

std::string_view kind_name(OperatorKind k);
OperatorKind parse_kind(std::string_view s);  // throws PolicyError

bool is_join(OperatorKind k);

struct OperatorPolicy {
  std::uint32_t id = 0;
  OperatorKind kind = OperatorKind::map;
  std::string stream;
  std::string stream2;                       // join kinds only
  std::vector<std::string> map_attrs;        // B
  std::vector<policy::Predicate> filters;    // stream 1 (and stream 2 unless filters2 is set)
  std::vector<policy::Predicate> filters2;   // join kinds: stream 2
  std::string join_attr;
  std::uint32_t buffer1 = 0, buffer2 = 0;    // join buffer lengths
  std::string agg_attr;
  std::uint32_t ws = 0;
  std::uint64_t start = 0;                   // filter_agg: first admitted TS
  std::uint8_t agg_variant = 0;              // filter_agg: 2 or 3

  const std::vector<policy::Predicate>& filters_for(int side) const {
    return side == 1 && !filters2.empty() ? filters2 : filters;
  }

  // Directive lines ("policy N", "kind K", "stream S", "stream2 S", "map A..",
  // "join J", "buffers L1 L2", "aggregate A", "window WS", "start X",
  // "variant 2|3", "where2 PRED") and predicate lines "ATTR OP CONST [MOD]".
  // '#' starts a comment. Throws PolicyError.
  static OperatorPolicy parse(std::string_view text);
  std::string to_text() const;

  // Structural checks against the referenced stream(s). Throws PolicyError.
  void validate(const StreamConfig& s1, const StreamConfig* s2) const;

  void write(ByteWriter& w) const;
  static OperatorPolicy read(ByteReader& r);
  bool operator==(const OperatorPolicy&) const = default;
};

// ---- wire records ----

enum class ComponentType : std::uint8_t { abe = 1, hybrid = 2, det = 3 };

struct SecureComponent {
  std::string label;
  std::variant<abe::AbeCiphertext, abe::HybridCiphertext, det::DetCiphertext> body;
};

// One encrypted tuple: plaintext ts, plaintext filter hints, labelled
// ciphertext components.
struct SecureTuple {
  std::uint64_t ts = 0;
  std::vector<std::pair<std::string, std::uint64_t>> hints;
  std::vector<SecureComponent> components;

  const SecureComponent* find(std::string_view label) const;
  const abe::AbeCiphertext* abe(std::string_view label) const;
  const abe::HybridCiphertext* hybrid(std::string_view label) const;
  const det::DetCiphertext* det(std::string_view label) const;

  Bytes to_bytes() const;
  // Throws DecodeError (including on duplicate labels).
  static SecureTuple from_bytes(std::span<const std::uint8_t> bytes);
};

struct OutputItem {
  std::string label;
  std::variant<abe::TransformedCiphertext, abe::TransformedHybrid> body;
};

// Cloud-to-user record: the source timestamps it derives from and the
// transformed components.
struct OutputRecord {
  std::uint32_t policy_id = 0;
  std::vector<std::uint64_t> ts;
  std::vector<OutputItem> items;

  const OutputItem* find(std::string_view label) const;
  Bytes to_bytes() const;
  static OutputRecord from_bytes(std::span<const std::uint8_t> bytes);
};

// Component labels.
std::string map_label(std::string_view a);
std::string mf_label(std::string_view a);
std::string join_label(std::string_view j);
std::string det_label(std::string_view j);
std::string w1_label(std::string_view a);
std::string agg1_label(std::string_view a, std::uint32_t ws);
std::string agg2_label(std::string_view a, std::uint32_t ws);
std::string agg3u_label(std::string_view a);
std::string agg3v_label(std::string_view a);
inline constexpr const char* kFilterLabel = "filter";

// Encryption-attribute families used only by the operator encodings.
std::string tuple_attr();                         // "tuple": marks the Filter payload
std::string masked_attr(std::string_view a);      // "agg=A": Agg-3 masked value
std::string cumulative_attr(std::string_view a);  // "cum=A": Agg-3 cumulative mask

}  // namespace cipherflow::ops

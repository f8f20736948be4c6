#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cipherflow/abe/access_tree.hpp"
#include "cipherflow/algebra/context.hpp"
#include "cipherflow/codec.hpp"

namespace cipherflow::abe {

using algebra::G1;
using algebra::G2;
using algebra::Gt;
using algebra::Scalar;

// Ordered attribute names of a small-universe deployment.
class AttributeIndex {
 public:
  explicit AttributeIndex(std::vector<std::string> names);  // throws PolicyError on duplicates

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t at(const std::string& name) const;  // throws PolicyError
  bool contains(const std::string& name) const { return find(name).has_value(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> pos_;
};

// Public parameters: generators, T_i = g1^t_i per attribute, e(g,g)^y.
struct PublicKey {
  algebra::ContextPtr ctx;
  std::shared_ptr<const AttributeIndex> universe;
  std::vector<G1> attribute_elems;
  Gt egg_y;
  std::shared_ptr<const algebra::FixedBaseGt> egg_y_table;

  Bytes to_bytes() const;
  static PublicKey from_bytes(algebra::ContextPtr ctx, std::span<const std::uint8_t> bytes);
};

// Owner-only secrets (y, t_1..t_U). Never leaves the owner process.
struct MasterKey {
  algebra::ContextPtr ctx;
  std::shared_ptr<const AttributeIndex> universe;
  Scalar y;
  std::vector<Scalar> attribute_secrets;

  Bytes to_bytes() const;
  static MasterKey from_bytes(algebra::ContextPtr ctx, std::span<const std::uint8_t> bytes);
};

// Held by the cloud: the access tree plus one G2 element per leaf
// (depth-first order), D_x = g2^(q_x(0) / (z_u * t_a(x))).
struct TransformKey {
  AccessTree tree;
  std::vector<G2> leaf_keys;

  Bytes to_bytes() const;
  static TransformKey from_bytes(std::span<const std::uint8_t> bytes);
};

// z_u, held by the user only.
struct UserSecret {
  Scalar z;
};

struct AbeCiphertext {
  std::vector<std::string> attributes;  // sorted, unique
  Gt e;                                 // m * e(g,g)^(y s)
  std::vector<G1> e_prime;              // T_a^s, aligned with `attributes`

  AttributeSet attribute_set() const { return {attributes.begin(), attributes.end()}; }
  const G1* component(const std::string& attribute) const;

  void write(ByteWriter& w) const;
  static AbeCiphertext read(ByteReader& r);
  Bytes to_bytes() const;
  static AbeCiphertext from_bytes(std::span<const std::uint8_t> bytes);
};

// (U, V) = (E, e(g,g)^(y s / z_u)); decrypts as U / V^z_u.
struct TransformedCiphertext {
  Gt u;
  Gt v;

  void write(ByteWriter& w) const;
  static TransformedCiphertext read(ByteReader& r);
};

std::pair<PublicKey, MasterKey> abe_gen(algebra::ContextPtr ctx, std::vector<std::string> universe, algebra::Rng& rng);

// Throws PolicyError for leaves outside the universe.
std::pair<TransformKey, UserSecret> abe_keygen(const MasterKey& mk, const AccessTree& tree, algebra::Rng& rng);

// Throws PolicyError for attributes outside the universe.
AbeCiphertext abe_enc(const Gt& m, const PublicKey& pk, const std::vector<std::string>& attributes, algebra::Rng& rng);

// nullopt when the ciphertext's attributes do not satisfy the key's tree.
std::optional<TransformedCiphertext> abe_trans(const TransformKey& tk, const AbeCiphertext& ct);

Gt abe_dec(const UserSecret& sk, const TransformedCiphertext& tct);

// Componentwise; both operands must come from the same transform key.
TransformedCiphertext tct_mul(const TransformedCiphertext& a, const TransformedCiphertext& b);
TransformedCiphertext tct_div(const TransformedCiphertext& a, const TransformedCiphertext& b);
// Decrypts to the given plaintext under any user secret: (m, 1).
inline TransformedCiphertext tct_plain(const Gt& m) { return {m, Gt{}}; }

// Byte payloads: the ABE layer encrypts a random target-group element whose
// hash keys an XChaCha20-Poly1305 wrap of the bytes.
struct HybridCiphertext {
  AbeCiphertext capsule;
  Bytes sealed;  // nonce || ciphertext || tag

  void write(ByteWriter& w) const;
  static HybridCiphertext read(ByteReader& r);
};

struct TransformedHybrid {
  TransformedCiphertext capsule;
  Bytes sealed;

  void write(ByteWriter& w) const;
  static TransformedHybrid read(ByteReader& r);
};

HybridCiphertext abe_enc_bytes(std::span<const std::uint8_t> payload, const PublicKey& pk,
                               const std::vector<std::string>& attributes, algebra::Rng& rng);
std::optional<TransformedHybrid> abe_trans_hybrid(const TransformKey& tk, const HybridCiphertext& ct);
// Throws KeyError when authentication fails (wrong user secret).
Bytes abe_dec_bytes(const UserSecret& sk, const TransformedHybrid& tct);

}  // namespace cipherflow::abe

#include "cipherflow/algebra/context.hpp"

#include <mutex>

#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/error.hpp"

namespace cipherflow::algebra {

FixedBaseGt::FixedBaseGt(const Gt& base) : base_(base) {
  table_.resize(32 * 256);
  Gt window_base = base;
  for (int w = 0; w < 32; ++w) {
    Gt* row = &table_[w * 256];
    row[0] = Gt{};
    for (int d = 1; d < 256; ++d) row[d] = row[d - 1] * window_base;
    window_base = row[255] * window_base;
  }
}

Gt FixedBaseGt::pow(const Scalar& e) const {
  ++thread_op_counts().gt_exps;
  auto raw = e.to_blst();
  Gt acc;
  for (int w = 0; w < 32; ++w) {
    const auto digit = raw.b[w];
    if (digit != 0) acc *= table_[w * 256 + digit];
  }
  return acc;
}

BilinearContext::BilinearContext()
    : g1_(G1::generator()), g2_(G2::generator()), gt_(pairing(G1::generator(), G2::generator())) {}

std::shared_ptr<const BilinearContext> BilinearContext::setup(int security_bits) {
  if (security_bits != 128)
    throw Error("unsupported security parameter " + std::to_string(security_bits) + " (only 128 is available)");
  static std::once_flag once;
  static std::shared_ptr<const BilinearContext> shared;
  std::call_once(once, [] { shared.reset(new BilinearContext()); });
  return shared;
}

}  // namespace cipherflow::algebra

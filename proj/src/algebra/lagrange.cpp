#include "cipherflow/algebra/lagrange.hpp"

#include "cipherflow/error.hpp"

namespace cipherflow::algebra {

Scalar lagrange_coeff(const Scalar& i, std::span<const Scalar> points, const Scalar& x) {
  bool found = false;
  Scalar num = Scalar::from_u64(1), den = Scalar::from_u64(1);
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b)
      if (points[a] == points[b]) throw DomainError("duplicate interpolation point");
    if (points[a] == i) {
      found = true;
      continue;
    }
    num *= x - points[a];
    den *= i - points[a];
  }
  if (!found) throw DomainError("interpolation point not in set");
  return num / den;
}

}  // namespace cipherflow::algebra

#pragma once

#include <span>

#include "cipherflow/algebra/scalar.hpp"

namespace cipherflow::algebra {

// Lagrange basis coefficient: prod_{j in S, j != i} (x - j) / (i - j).
// Throws DomainError if i is not in S or S has duplicate points.
Scalar lagrange_coeff(const Scalar& i, std::span<const Scalar> points, const Scalar& x);

}  // namespace cipherflow::algebra

#pragma once

#include <vector>

namespace spiked {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
};

/// Gauss-Hermite rule for E f(z), z ~ N(0, 1): weights sum to 1 and the rule
/// is exact for polynomials of degree <= 2 * order - 1.
QuadratureRule gauss_hermite(int order);

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int order);

/// Process-wide cache; rules are built on first use and never invalidated.
const QuadratureRule& cached_gauss_legendre(int order);
const QuadratureRule& cached_gauss_hermite(int order);

}  // namespace spiked

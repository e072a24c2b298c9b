#pragma once

#include <vector>

namespace expsamp {

/// Gauss-Legendre rule on [-1, 1]. Exact for polynomials of degree 2*order-1.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Builds the rule by Newton iteration on the Legendre recurrence.
/// Throws ConfigError for order == 0.
GaussLegendreRule gauss_legendre(unsigned order);

/// Cached rule; returned reference stays valid for the program lifetime.
const GaussLegendreRule& gauss_legendre_cached(unsigned order);

}  // namespace expsamp

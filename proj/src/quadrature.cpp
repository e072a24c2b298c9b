#include "expsamp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "expsamp/errors.hpp"

namespace expsamp {

GaussLegendreRule gauss_legendre(unsigned order) {
  if (order == 0) throw ConfigError("gauss_legendre: order must be >= 1");

  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const unsigned half = (order + 1) / 2;
  for (unsigned i = 0; i < half; ++i) {
    // Tricomi's initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (unsigned k = 1; k <= order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    rule.weights[i] = weight;
    rule.weights[order - 1 - i] = weight;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

const GaussLegendreRule& gauss_legendre_cached(unsigned order) {
  static std::mutex mutex;
  static std::map<unsigned, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, gauss_legendre(order)).first;
  return it->second;
}

}  // namespace expsamp

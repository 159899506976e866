#pragma once

#include <cstddef>
#include <vector>

namespace transient {

/// Sampled momentum density |<p|psi(t)>|^2 on increasing momenta.
struct MomentumDistribution {
  double t = 0.0;
  std::vector<double> p;
  std::vector<double> density;

  std::size_t size() const { return p.size(); }

  double trapezoid_norm() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      acc += 0.5 * (density[i] + density[i - 1]) * (p[i] - p[i - 1]);
    }
    return acc;
  }
};

}  // namespace transient

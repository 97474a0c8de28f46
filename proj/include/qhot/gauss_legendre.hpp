#pragma once

#include <vector>

namespace qhot {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Returns the n-point rule, computed on first use and cached.  Nodes are
// found by Newton iteration on the Legendre recurrence from the Chebyshev
// initial guess; accurate to ~1e-15 for the orders used here (n <= 512).
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace qhot

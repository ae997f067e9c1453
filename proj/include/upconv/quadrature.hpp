#pragma once

#include <vector>

namespace upconv {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [lo, hi]. Nodes ascending.
QuadratureRule gauss_legendre(int n, double lo, double hi);

}  // namespace upconv

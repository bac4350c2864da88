#pragma once

#include <vector>

namespace remlab {

struct GaussLegendreRule {
  std::vector<double> nodes;  // on [-1, 1], increasing
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule by Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace remlab

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kpz {

struct QuadRule {
  Eigen::VectorXd x, w;
};

// Gauss-Legendre rule with m nodes on [lo, hi].
QuadRule gauss_legendre(int m, double lo = -1.0, double hi = 1.0);

// Composite rule: every interval [edges[i], edges[i+1]] is cut into panels no
// wider than `width`, each carrying an m-node Gauss-Legendre rule.
QuadRule composite_rule(const std::vector<double>& edges, double width, int m);

}  // namespace kpz

#include "kpzlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kpz {

QuadRule gauss_legendre(int m, double lo, double hi) {
  if (m < 1) throw std::invalid_argument("quadrature needs at least one node");
  QuadRule q{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1, p1 = x;
    for (int k = 2; k <= m; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1);
    q.x(m - 1 - i) = 0.5 * (hi - lo) * x + 0.5 * (hi + lo);
    q.w(m - 1 - i) = (hi - lo) / ((1 - x * x) * dp * dp);
  }
  return q;
}

QuadRule composite_rule(const std::vector<double>& edges, double width, int m) {
  std::vector<double> xs, ws;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    if (!(hi > lo)) continue;
    int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / width - 1e-12)));
    for (int k = 0; k < panels; ++k) {
      double a = lo + (hi - lo) * k / panels, b = lo + (hi - lo) * (k + 1) / panels;
      QuadRule g = gauss_legendre(m, a, b);
      for (int j = 0; j < m; ++j) {
        xs.push_back(g.x(j));
        ws.push_back(g.w(j));
      }
    }
  }
  QuadRule q{Eigen::VectorXd(xs.size()), Eigen::VectorXd(ws.size())};
  for (std::size_t j = 0; j < xs.size(); ++j) q.x(j) = xs[j], q.w(j) = ws[j];
  return q;
}

}  // namespace kpz

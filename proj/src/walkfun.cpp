#include "kpzlab/walkfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kpzlab/specfun.hpp"

namespace kpz {

double walk_step_weight(Model model, long k, double p_or_q) {
  if (k < 1) return 0.0;
  double g = std::ldexp(1.0, static_cast<int>(-k));
  if (model == Model::Parallel) return k == 1 ? 0.5 : g / (1.0 - p_or_q);
  return g;
}

std::vector<Absorption> absorption_law(Model model, const InitialData& y, int n, long v,
                                       double p_or_q) {
  if (n < 1) throw std::invalid_argument("walk factor needs n >= 1");
  if (n > y.size()) throw std::invalid_argument("initial data shorter than n");
  std::vector<Absorption> out;
  const long lo = y.lattice(n) + 1;
  if (v < lo) return out;
  const long width = v - lo + 1;
  std::vector<double> step(width + 1);
  for (long k = 0; k <= width; ++k) step[k] = walk_step_weight(model, k, p_or_q);

  std::vector<double> dist(width, 0.0), next(width);
  dist[width - 1] = 1.0;
  for (int m = 0; m < n; ++m) {
    const long ym = y.lattice(m + 1);
    std::fill(next.begin(), next.end(), 0.0);
    bool alive = false;
    for (long i = 0; i < width; ++i) {
      double w = dist[i];
      if (w == 0.0) continue;
      long x = lo + i;
      if (x > ym) {
        out.push_back({m, x, w});
      } else {
        for (long j = 0; j < i; ++j) next[j] += w * step[i - j];
        alive = alive || i > 0;
      }
    }
    dist.swap(next);
    if (!alive) break;
  }
  return out;
}

double phi_epi_discrete(Model model, const InitialData& y, double t, long a, int n, long v,
                        double p_or_q, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  double total = 0.0;
  for (const Absorption& ab : absorption_law(model, y, n, v, p_or_q))
    total += ab.weight * model_basis(model, BasisKind::Phibar, t, a, n - ab.step, ab.x, p_or_q);
  return total;
}

double poly_eval(const Eigen::VectorXd& c, double z) {
  double acc = 0.0;
  for (long k = c.size() - 1; k >= 0; --k) acc = acc * z + c(k);
  return acc;
}

Eigen::VectorXd poly_integral(const Eigen::VectorXd& c) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(c.size() + 1);
  for (long k = 0; k < c.size(); ++k) out(k + 1) = c(k) / static_cast<double>(k + 1);
  return out;
}

double PiecewisePoly::operator()(double x) const {
  if (breaks.empty() || x < breaks.front()) return 0.0;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  std::size_t i = static_cast<std::size_t>(it - breaks.begin()) - 1;
  return poly_eval(coeffs[i], x - center);
}

PiecewisePoly rbm_walk_profile(const InitialData& y, double t, double r, int n) {
  if (n < 1) throw std::invalid_argument("walk factor needs n >= 1");
  if (n > y.size()) throw std::invalid_argument("initial data shorter than n");
  PiecewisePoly h;
  h.center = r;
  for (int k = 1; k <= n; ++k) h.breaks.push_back(y.at(k));
  std::sort(h.breaks.begin(), h.breaks.end());
  h.breaks.erase(std::unique(h.breaks.begin(), h.breaks.end()), h.breaks.end());
  const std::size_t np = h.breaks.size();
  std::vector<Eigen::VectorXd> prev(np, Eigen::VectorXd::Zero(1));

  for (int k = n - 1; k >= 0; --k) {
    std::vector<Eigen::VectorXd> cur(np);
    double acc = 0.0;  // integral of the previous level from y_n to breaks[i]
    for (std::size_t i = 0; i < np; ++i) {
      double zi = h.breaks[i] - r;
      if (h.breaks[i] >= y.at(k + 1)) {
        cur[i] = phibar_poly(n - k - 1, t);
      } else {
        Eigen::VectorXd q = poly_integral(prev[i]);
        q(0) += acc - poly_eval(q, zi);
        cur[i] = q;
      }
      if (i + 1 < np) {
        Eigen::VectorXd q = poly_integral(prev[i]);
        acc += poly_eval(q, h.breaks[i + 1] - r) - poly_eval(q, zi);
      }
    }
    prev.swap(cur);
  }
  h.coeffs = std::move(prev);
  return h;
}

double phi_epi_continuous(const InitialData& y, double t, double a, int n, double v, int n_guard) {
  if (n > n_guard) throw std::out_of_range("walk factor level above guard");
  if (!(t > 0)) throw std::invalid_argument("t must be positive");
  return std::exp(a - v) * rbm_walk_profile(y, t, a, n)(v);
}

}  // namespace kpz

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kpzlab/model.hpp"

namespace kpz {

// Weight of a downward step of length k >= 1 of the walk attached to `model`.
double walk_step_weight(Model model, long k, double p_or_q);

struct Absorption {
  int step;  // tau
  long x;    // B_tau
  double weight;
};

// Law of (tau, B_tau) restricted to {tau < n} for the walk started at v. Only
// positions in (y_n, v] can ever be absorbed, so the recursion is exact.
std::vector<Absorption> absorption_law(Model model, const InitialData& y, int n, long v,
                                       double p_or_q = 0.5);

double phi_epi_discrete(Model model, const InitialData& y, double t, long a, int n, long v,
                        double p_or_q = 0.5, double tol = 1e-14);

// Piecewise polynomial on [breaks[0], inf), zero to the left of breaks[0].
// Each piece is stored in the shifted variable z = x - center.
struct PiecewisePoly {
  std::vector<double> breaks;
  std::vector<Eigen::VectorXd> coeffs;
  double center = 0.0;

  double operator()(double x) const;
};

double poly_eval(const Eigen::VectorXd& c, double z);
Eigen::VectorXd poly_integral(const Eigen::VectorXd& c);

// For the Exp(1) walk, the factor equals e^{r-v} H(v) with H piecewise
// polynomial with breakpoints at the y_k; this returns H.
PiecewisePoly rbm_walk_profile(const InitialData& y, double t, double r, int n);

double phi_epi_continuous(const InitialData& y, double t, double a, int n, double v,
                          int n_guard = 6);

}  // namespace kpz

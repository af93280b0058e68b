#pragma once

#include <optional>
#include <string>

#include "kpzlab/grid_field.hpp"
#include "kpzlab/mc_models.hpp"
#include "kpzlab/model.hpp"

namespace kpz {

struct ContinuousScheme {
  double dt = 1e-3;      // RK4 step of the lattice ODEs
  double h = 0.04;       // RBM similarity-grid spacing
  double xi_max = 8.0;   // RBM similarity-grid half width
  double t_start = 1e-12;
  double floor = 1e-8;   // points whose lower level falls below this are invalid
};

struct DiscreteScheme {
  double floor = 1e-8;
};

struct HierarchyResult {
  GridField F;
  bool monotone = true;          // non-increasing in a at every stored (t, n)
  long invalid = 0;
  double relation_residual = 0;  // discrete only: max relative defect of the solved relation
  std::string scheme;
};

// TASEP and Push-TASEP are evolved as ratios g_n = F_n / F_{n-1} (TASEP) or
// F_{a,n} / F_{a+1,n-1} (Push-TASEP), which stay in [0, 1] and start from
// indicators at t = 0. RBM needs packed data and is solved in the
// similarity variables (a - y - c t) / sqrt(t) against log t; an optional
// wall must be linear, b(t) = c t. The Dt channel is filled for the
// lattice models.
HierarchyResult evolve_continuous(Model eq, const InitialData& y, const std::optional<Wall>& wall,
                                  const Axis& t_axis, const Axis& a_axis, int n_lo, int n_hi,
                                  const ContinuousScheme& scheme = {});

// Parallel, Blocking and Pushing recursions in F-form from F_0 = 1{y_n > a}
// (and the exact one-step law at t = 1 for Parallel).
HierarchyResult recurse_discrete(Model eq, const InitialData& y, double p_or_q, const Axis& t_axis,
                                 const Axis& a_axis, int n_lo, int n_hi, const DiscreteScheme& scheme = {});

HierarchyResult solve_hierarchy(Model eq, const InitialData& y, const std::optional<Wall>& wall, double p_or_q,
                                const Axis& t_axis, const Axis& a_axis, int n_lo, int n_hi);

}  // namespace kpz

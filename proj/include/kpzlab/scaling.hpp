#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kpzlab/grid_field.hpp"
#include "kpzlab/hirota.hpp"

namespace kpz {

enum class ScalingMap {
  RbmToKp,
  TasepToKp,
  ParallelToKp,
  ParallelToRbm,
  ParallelToToda,
  ParallelToTasep,
  TasepToRbm,
};

std::string scaling_map_name(ScalingMap m);
ScalingMap parse_scaling_map(const std::string& name);
std::vector<ScalingMap> all_scaling_maps();

// Smooth field in target coordinates: (T, X, A) for KP, (T, A, n) for RBM,
// (T, a, n) for TASEP and (T, X, r) for the 2D Toda form.
using SmoothField = std::function<double(double, double, double)>;

struct MapInfo {
  ScalingMap id = ScalingMap::RbmToKp;
  EquationId source;
  EquationId target;
  int order = 2;             // leading power of epsilon
  double coefficient = 1.0;  // source residual ~ coefficient * eps^order * target residual
  std::array<AxisKind, 3> source_kinds{};
};

MapInfo map_info(ScalingMap m, double p = 0.5);

// Source parameter at a given epsilon (p = eps for the RBM and TASEP limits of
// Parallel TASEP, 1 - 4 eps^2 for the Toda limit, the fixed p otherwise).
double source_parameter(ScalingMap m, double eps, double p = 0.5);

// Target coordinates of the source point (t, a, n), in the order expected by
// the SmoothField. The KP maps take the level as a continuous variable.
std::array<double, 3> map_point(ScalingMap m, double t, double a, double n, double eps, double p = 0.5);

// F(t, a, n) := F_smooth(map(t, a, n)) sampled on the source grid. For the
// KP maps a source pair (n, n-1) is expanded about the level n - 1/2.
GridField pullback(ScalingMap m, const SmoothField& F, const Axis& t_axis, const Axis& a_axis, const Axis& n_axis,
                   double eps, double p = 0.5);

struct RateRow {
  double eps = 0.0;
  double residual = 0.0;         // source residual at the probe
  double target_residual = 0.0;  // target residual at the image of the probe
  double ratio = 0.0;            // residual / (coefficient eps^order target_residual)
};

struct RateReport {
  ScalingMap map = ScalingMap::RbmToKp;
  std::vector<RateRow> rows;
  double exponent = 0.0;  // least-squares slope of log|r| against log eps
  int expected_order = 2;
  double coefficient = 1.0;
  bool target_vanishes = false;
  bool faster_than_leading = false;  // residual decays beyond eps^order
};

// Source point (t, a, n) at which residuals are probed; its expansion point
// maps to the target origin up to O(eps^{1/2}) lattice rounding.
std::array<double, 3> probe_source(ScalingMap m);
// Target coordinates of the expansion point of the probe.
std::array<double, 3> probe_image(ScalingMap m, double eps, double p = 0.5);

// Target residual of F_smooth at a target point by fourth-order stencils.
double target_residual(ScalingMap m, const SmoothField& F, const std::array<double, 3>& at);

// Source residual at the probe after pulling F_smooth back.
double source_residual(ScalingMap m, const SmoothField& F, double eps, double p = 0.5);

// Throws std::invalid_argument for fewer than four or non-decreasing eps
// and std::domain_error when the target residual vanishes while the source
// residual does not decay faster than eps^order.
RateReport scaling_rate(ScalingMap m, const SmoothField& F, const std::vector<double>& eps_list, double p = 0.5);

// eps = 1 / k for k in `denominators`.
std::vector<double> reciprocal_eps(const std::vector<int>& denominators);
// 1/40, 1/160, ..., 1/10240
std::vector<double> default_scaling_eps();

// Parallel TASEP residual at (t, a, n) against the HBDE residual (weights
// 1, -p, -(1-p)) of G(t, x, r) = F_{floor((t - x - r)/2) + 1}(t, x) at
// r = t - a - (2n - 2), over every point where both stencils fit.
struct HbdeReport {
  double max_deviation = 0.0;
  double max_parallel = 0.0;
  double max_hbde = 0.0;
  long points = 0;
};
HbdeReport hbde_equivalence(const GridField& F, double p);

}  // namespace kpz

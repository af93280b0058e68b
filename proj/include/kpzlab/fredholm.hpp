#pragma once

#include <Eigen/Dense>
#include <string>

#include "kpzlab/grid_field.hpp"
#include "kpzlab/linalg.hpp"
#include "kpzlab/model.hpp"

namespace kpz {

struct Discretization {
  double p_or_q = 0.5;          // p for Parallel/Blocking, q for Pushing
  int rbm_nodes_per_panel = 16;
  double rbm_R = 0.0;           // 0 selects max(8 sqrt t, 8)
  double rbm_panel_width = 0.0; // 0 selects sqrt t
  double push_tail = 1e-17;
};

struct TruncationRecord {
  double node_lo = 0, node_hi = 0;
  double r_lo = 0, r_hi = 0;
  double tail_bound = 0;
};

// Kernels are stored conjugated by 2^{u-a} (lattice) or e^{u-a} (RBM); the
// determinant and all resolvent pairings <R psi, phi> are unchanged by this.
struct KernelAssembly {
  Model model = Model::TASEP;
  InitialData y;
  double t = 0, a = 0;
  int n = 1;
  Discretization disc;
  Eigen::VectorXd nodes, weights;
  Eigen::VectorXd r_nodes, r_weights;
  Eigen::MatrixXd psi;     // nodes x r, r-weights folded in
  Eigen::MatrixXd phi;     // r x nodes
  Eigen::MatrixXd matrix;  // K(u_i, u_j) w_j
  TruncationRecord trunc;

  bool empty() const { return nodes.size() == 0; }
};

KernelAssembly assemble_kernel(Model model, const InitialData& y, double t, double a, int n,
                               const Discretization& disc = {});

DetResult<double> det_fredholm(const KernelAssembly& k);

double resolvent_inner(const KernelAssembly& k, const Eigen::VectorXd& f,
                       const Eigen::VectorXd& g);

// Conjugated psi_{t,r,m} and phi^y_{t,r,m} sampled on the assembly nodes.
Eigen::VectorXd psi_on_nodes(const KernelAssembly& k, double r, int m);
Eigen::VectorXd phi_on_nodes(const KernelAssembly& k, double r, int m);

// F * <R f, g>, switching to the rank-one determinant identity
// F - det(I - K - f (x) g) where F is too small for a stable solve.
double scaled_resolvent_inner(const KernelAssembly& k, double F, const Eigen::VectorXd& f,
                              const Eigen::VectorXd& g);

struct Partials {
  double F = 1.0;
  double dF_dt = 0.0;
  double dF_da = 0.0;
  double d2F_da2 = 0.0;
  bool has_dt = false;
  bool has_da = false;
  bool near_singular = false;
};

Partials analytic_partials(Model model, const InitialData& y, double t, double a, int n,
                           const Discretization& disc = {});

double F_value(Model model, const InitialData& y, double t, double a, int n,
               const Discretization& disc = {});

bool in_validity_region(Model model, const InitialData& y, double t, double a, int n);

// Determinant field over t x a x [n_lo, n_hi]; levels n <= 0 are the boundary
// extension F = 1. With `partials`, the Dt channel (and Da, Daa for RBM) is
// filled from the resolvent formulas.
GridField F_field(Model model, const InitialData& y, const Axis& t_axis, const Axis& a_axis,
                  int n_lo, int n_hi, const Discretization& disc = {}, bool partials = false,
                  int threads = 0);

}  // namespace kpz

#pragma once

#include <array>
#include <functional>
#include <map>

#include "kpzlab/grid_field.hpp"
#include "kpzlab/hirota.hpp"

namespace kpz {

// Truncated Taylor expansion in (t, a) of total degree 3; c[i][j] multiplies
// t^i a^j.
struct Jet {
  static constexpr int D = 3;
  std::array<std::array<double, D + 1>, D + 1> c{};

  static Jet constant(double v);
  double value() const { return c[0][0]; }
  Jet dt() const;
  Jet da() const;

  friend Jet operator+(const Jet& x, const Jet& y);
  friend Jet operator-(const Jet& x, const Jet& y);
  friend Jet operator*(const Jet& x, const Jet& y);
  friend Jet operator/(const Jet& x, const Jet& y);
  friend Jet operator*(double s, const Jet& x);
};

// F around a base point, indexed by integer offsets along the discrete axes.
using JetField = std::function<Jet(Index3)>;

struct DerivedQuantities {
  GridField a_n;     // F_{n+1} F_{n-1} / F_n^2
  GridField u;       // d/da log F_n (continuous a)
  GridField grad_u;  // (u_{n+1} - u_{n-1}) / 2
  GridField r_a;     // F_{a-1,n+1} / F_{a,n} (discrete a)
  GridField r_ta;    // F_{t+1,a-1,n+1} / F_{t,a,n} (discrete t and a)
  bool has_u = false, has_r_a = false, has_r_ta = false;
};

// Levels n <= 0 outside the grid are taken as F = 1.
DerivedQuantities derived_quantities(const GridField& F);

struct KField {
  EquationId eq = EquationId::RBM;
  GridField K;
  double expected = 0.0;
  double max_dev = 0.0;
  Index3 argmax{};
  double max_shift_diff = 0.0;
  long count = 0;
};

// Supported for the RBM, TASEP and Parallel equations, whose expected
// constants are 0, -1 and 1 - p.
KField k_field(EquationId eq, const GridField& F, double p = 0.5, Accuracy acc = Accuracy::Second);
double expected_k(EquationId eq, double p);
Index3 k_shift(EquationId eq);

// Commutator [M, Mbar] at the base point, collected by shift.
std::map<std::array<int, 3>, double> zc_commutator(EquationId eq, const JetField& F, double p, double c = 1.0);

struct ZcEntry {
  double commutator = 0.0;  // coefficient of e^{-d_n}
  double prefactor = 0.0;
  double dK = 0.0;          // K at the shifted point minus K at the base point
  double other = 0.0;       // largest coefficient of any other shift
};

ZcEntry zc_entry(EquationId eq, const JetField& F, double p, double c = 1.0);
double k_value(EquationId eq, const JetField& F, Index3 at, double p);

struct ZcReport {
  EquationId eq = EquationId::RBM;
  long points = 0;
  double max_entry = 0.0;
  double max_mismatch = 0.0;  // |commutator - prefactor * dK| / max(1, |commutator|)
  double max_other = 0.0;
  Index3 argmax{};
};

// Runs zc_entry at every grid point whose stencil is available; jets are
// built from the analytic channels or central differences.
ZcReport zc_equivalence_check(EquationId eq, const GridField& F, double p = 0.5);

}  // namespace kpz

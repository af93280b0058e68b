#pragma once

#include <array>
#include <string>
#include <vector>

#include "kpzlab/grid_field.hpp"
#include "kpzlab/model.hpp"

namespace kpz {

enum class Accuracy { Second = 2, Fourth = 4 };

using Orders = std::array<int, 3>;

// Central finite-difference weights for the d-th derivative on nodes -m..m.
std::vector<double> central_weights(int d, Accuracy acc);
int stencil_halfwidth(int d, Accuracy acc);

// Mixed partial of F at p. Analytic channels are used when present
// (Dt for (1,0,0), Da for (0,1,0), Daa for (0,2,0)).
double partial(const GridField& f, Index3 p, Orders orders, Accuracy acc = Accuracy::Second);

// D^orders applied to the pair (f around pf, g around pg):
// sum over k <= orders of prod_i (-1)^{o_i-k_i} C(o_i,k_i) d^k f(pf) d^{o-k} g(pg).
double hirota_pair(const GridField& f, Index3 pf, const GridField& g, Index3 pg, Orders orders,
                   Accuracy acc = Accuracy::Second);

double hirota_derivative(const GridField& f, const GridField& g, int axis, int order, Index3 p,
                         Accuracy acc = Accuracy::Second);

// f(p + shift) g(p - shift)
double shift_bilinear(const GridField& f, const GridField& g, Index3 shift, Index3 p);

struct BilinearTerm {
  double coeff = 1.0;
  Index3 shift{};
  Orders orders{0, 0, 0};
};

enum class EquationId { RBM, TASEP, PushTASEP, Parallel, Blocking, Pushing, KP, HBDE, Toda2D };

// Each term evaluates D^orders on the pair F(x + shift), F(x + pair_offset - shift).
struct BilinearEquation {
  EquationId id = EquationId::RBM;
  std::string name;
  std::vector<BilinearTerm> terms;
  Index3 pair_offset{};
};

BilinearEquation make_equation(EquationId id, double p_or_q = 0.5);
BilinearEquation make_hbde(double z1, double z2, double z3);
EquationId equation_for(Model m);
EquationId parse_equation(const std::string& name);

double residual_at(const BilinearEquation& eq, const GridField& F, Index3 p,
                   Accuracy acc = Accuracy::Second);

struct ResidualField {
  GridField raw;
  GridField normalized;  // raw / (F(x) F(x + pair_offset))
  double max_raw = 0.0;
  double max_normalized = 0.0;
  Index3 argmax{};
  long evaluated = 0;
};

// Points of `region` whose stencil leaves the grid or touches an invalid
// value are flagged invalid in the output instead of raising.
ResidualField residual_field(const BilinearEquation& eq, const GridField& F, const IndexBox& region,
                             Accuracy acc = Accuracy::Second);

// Largest region on which every stencil of `eq` stays inside F.
IndexBox interior_region(const BilinearEquation& eq, const GridField& F,
                         Accuracy acc = Accuracy::Second);

// KP bilinear residual on a field sampled over (T, A, X) stored on the
// (t, a, n) axes.
ResidualField kp_residual(const GridField& F, Accuracy acc = Accuracy::Second);

}  // namespace kpz

#include "kpzlab/hirota.hpp"

#include <cmath>
#include <stdexcept>

namespace kpz {

namespace {

double binom(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Fornberg's recursion for derivative weights at 0 on integer nodes.
std::vector<double> fornberg(int d, int m) {
  const int np = 2 * m + 1;
  std::vector<double> x(np);
  for (int i = 0; i < np; ++i) x[i] = i - m;
  std::vector<std::vector<double>> c(np, std::vector<double>(d + 1, 0.0));
  double c1 = 1.0, c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < np; ++i) {
    int mn = std::min(i, d);
    double c2 = 1.0, c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(np);
  for (int i = 0; i < np; ++i) w[i] = c[i][d];
  return w;
}

bool analytic(const GridField& f, Orders o, double& out, Index3 p) {
  if (o == Orders{1, 0, 0} && f.has(Channel::Dt)) return out = f.get(Channel::Dt, p), true;
  if (o == Orders{0, 1, 0} && f.has(Channel::Da)) return out = f.get(Channel::Da, p), true;
  if (o == Orders{0, 2, 0} && f.has(Channel::Daa)) return out = f.get(Channel::Daa, p), true;
  return false;
}

double value_checked(const GridField& f, Index3 p) {
  if (!f.contains(p)) throw std::out_of_range("stencil leaves the grid");
  if (!f.valid(p)) throw std::domain_error("stencil touches an invalid value");
  return f(p);
}

int order_halfwidth(const GridField& f, Orders o, int axis, Accuracy acc) {
  if (o[axis] == 0) return 0;
  double dummy;
  if (f.has(Channel::Dt) && o == Orders{1, 0, 0}) return 0;
  if (f.has(Channel::Da) && o == Orders{0, 1, 0}) return 0;
  if (f.has(Channel::Daa) && o == Orders{0, 2, 0}) return 0;
  (void)dummy;
  return stencil_halfwidth(o[axis], acc);
}

}  // namespace

int stencil_halfwidth(int d, Accuracy acc) {
  if (d == 0) return 0;
  return (d + 1) / 2 - 1 + static_cast<int>(acc) / 2;
}

std::vector<double> central_weights(int d, Accuracy acc) {
  return fornberg(d, stencil_halfwidth(d, acc));
}

double partial(const GridField& f, Index3 p, Orders o, Accuracy acc) {
  if (o == Orders{0, 0, 0}) return value_checked(f, p);
  double v;
  if (analytic(f, o, v, p)) {
    value_checked(f, p);
    return v;
  }
  std::array<std::vector<double>, 3> w;
  std::array<int, 3> m{0, 0, 0};
  for (int ax = 0; ax < 3; ++ax) {
    if (o[ax] == 0) {
      w[ax] = {1.0};
      continue;
    }
    if (f.axis(ax).kind != AxisKind::Continuous)
      throw std::invalid_argument("Hirota derivative along a discrete axis");
    w[ax] = central_weights(o[ax], acc);
    m[ax] = stencil_halfwidth(o[ax], acc);
  }
  double total = 0.0;
  for (int i = -m[0]; i <= m[0]; ++i)
    for (int j = -m[1]; j <= m[1]; ++j)
      for (int k = -m[2]; k <= m[2]; ++k) {
        double c = w[0][i + m[0]] * w[1][j + m[1]] * w[2][k + m[2]];
        if (c == 0.0) continue;
        total += c * value_checked(f, p + Index3{i, j, k});
      }
  for (int ax = 0; ax < 3; ++ax) total /= std::pow(f.axis(ax).spacing, o[ax]);
  return total;
}

double hirota_pair(const GridField& f, Index3 pf, const GridField& g, Index3 pg, Orders o,
                   Accuracy acc) {
  double total = 0.0;
  for (int i = 0; i <= o[0]; ++i)
    for (int j = 0; j <= o[1]; ++j)
      for (int k = 0; k <= o[2]; ++k) {
        int odd = (o[0] - i) + (o[1] - j) + (o[2] - k);
        double c = binom(o[0], i) * binom(o[1], j) * binom(o[2], k) * (odd % 2 ? -1.0 : 1.0);
        total += c * partial(f, pf, {i, j, k}, acc) *
                 partial(g, pg, {o[0] - i, o[1] - j, o[2] - k}, acc);
      }
  return total;
}

double hirota_derivative(const GridField& f, const GridField& g, int axis, int order, Index3 p,
                         Accuracy acc) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis out of range");
  if (f.axis(axis).kind != AxisKind::Continuous || g.axis(axis).kind != AxisKind::Continuous)
    throw std::invalid_argument("Hirota derivative along a discrete axis");
  int need = (order + 1) / 2 + 1;
  if (p[axis] < need || p[axis] > f.axis(axis).size - 1 - need)
    throw std::out_of_range("point too close to the axis boundary");
  Orders o{0, 0, 0};
  o[axis] = order;
  return hirota_pair(f, p, g, p, o, acc);
}

double shift_bilinear(const GridField& f, const GridField& g, Index3 shift, Index3 p) {
  return value_checked(f, p + shift) * value_checked(g, p - shift);
}

BilinearEquation make_hbde(double z1, double z2, double z3) {
  BilinearEquation e;
  e.id = EquationId::HBDE;
  e.name = "hbde";
  e.terms = {{z1, {1, 0, 0}, {0, 0, 0}}, {z2, {0, 1, 0}, {0, 0, 0}}, {z3, {0, 0, 1}, {0, 0, 0}}};
  return e;
}

BilinearEquation make_equation(EquationId id, double pq) {
  BilinearEquation e;
  e.id = id;
  const Orders none{0, 0, 0};
  switch (id) {
    case EquationId::RBM:
      e.name = "rbm";
      e.pair_offset = {0, 0, -1};
      e.terms = {{1.0, {}, {1, 0, 0}}, {-0.5, {}, {0, 2, 0}}};
      break;
    case EquationId::TASEP:
      e.name = "tasep";
      e.pair_offset = {0, 0, -1};
      e.terms = {{1.0, {}, {1, 0, 0}}, {-1.0, {0, -1, 0}, none}, {1.0, {}, none}};
      break;
    case EquationId::PushTASEP:
      e.name = "push-tasep";
      e.pair_offset = {0, 1, -1};
      e.terms = {{1.0, {}, {1, 0, 0}}, {-1.0, {0, 1, 0}, none}, {1.0, {}, none}};
      break;
    case EquationId::Parallel:
      e.name = "parallel";
      e.pair_offset = {0, 0, -1};
      e.terms = {{1.0, {1, 0, 0}, none}, {-pq, {0, -1, 0}, none}, {-(1 - pq), {}, none}};
      break;
    case EquationId::Blocking:
      e.name = "blocking";
      e.pair_offset = {1, 0, -1};
      e.terms = {{1.0, {1, 0, 0}, none}, {-pq, {0, -1, 0}, none}, {-(1 - pq), {}, none}};
      break;
    case EquationId::Pushing:
      e.name = "pushing";
      e.pair_offset = {1, 1, -1};
      e.terms = {{1.0, {1, 0, 0}, none}, {-pq, {0, 1, 0}, none}, {-(1 - pq), {}, none}};
      break;
    case EquationId::KP:
      // axes (T, A, X)
      e.name = "kp";
      e.terms = {{1.0, {}, {1, 1, 0}}, {0.25, {}, {0, 0, 2}}, {1.0 / 12, {}, {0, 4, 0}}};
      break;
    case EquationId::HBDE: {
      BilinearEquation h = make_hbde(1.0, -pq, -(1 - pq));
      return h;
    }
    case EquationId::Toda2D:
      // axes (T, X, r)
      e.name = "2dtl";
      e.terms = {{0.5, {}, {2, 0, 0}}, {-0.5, {}, {0, 2, 0}}, {-4.0, {0, 0, 1}, none}, {4.0, {}, none}};
      break;
  }
  return e;
}

EquationId equation_for(Model m) {
  switch (m) {
    case Model::RBM: return EquationId::RBM;
    case Model::TASEP: return EquationId::TASEP;
    case Model::PushTASEP: return EquationId::PushTASEP;
    case Model::Parallel: return EquationId::Parallel;
    case Model::Blocking: return EquationId::Blocking;
    case Model::Pushing: return EquationId::Pushing;
  }
  return EquationId::RBM;
}

EquationId parse_equation(const std::string& name) {
  for (EquationId id : {EquationId::RBM, EquationId::TASEP, EquationId::PushTASEP, EquationId::Parallel,
                        EquationId::Blocking, EquationId::Pushing, EquationId::KP, EquationId::HBDE,
                        EquationId::Toda2D})
    if (make_equation(id).name == name) return id;
  return equation_for(parse_model(name));
}

double residual_at(const BilinearEquation& eq, const GridField& F, Index3 p, Accuracy acc) {
  double total = 0.0;
  for (const BilinearTerm& term : eq.terms) {
    Index3 left = p + term.shift, right = p + eq.pair_offset - term.shift;
    total += term.coeff * hirota_pair(F, left, F, right, term.orders, acc);
  }
  return total;
}

IndexBox interior_region(const BilinearEquation& eq, const GridField& F, Accuracy acc) {
  IndexBox b = F.box();
  for (const BilinearTerm& term : eq.terms) {
    for (int ax = 0; ax < 3; ++ax) {
      int m = order_halfwidth(F, term.orders, ax, acc);
      for (int off : {term.shift[ax], eq.pair_offset[ax] - term.shift[ax]}) {
        b.lo[ax] = std::max(b.lo[ax], m - off);
        b.hi[ax] = std::min(b.hi[ax], F.axis(ax).size - 1 - m - off);
      }
    }
  }
  return b;
}

ResidualField residual_field(const BilinearEquation& eq, const GridField& F, const IndexBox& region,
                             Accuracy acc) {
  ResidualField r;
  r.raw = GridField(F.axis(0), F.axis(1), F.axis(2));
  r.normalized = r.raw;
  F.for_each([&](Index3 p) {
    bool ok = region.contains(p);
    if (ok) {
      try {
        double v = residual_at(eq, F, p, acc);
        double scale = F(p) * F(p + eq.pair_offset);
        r.raw(p) = v;
        ++r.evaluated;
        if (std::abs(v) > r.max_raw) r.max_raw = std::abs(v);
        if (scale != 0.0 && std::isfinite(v / scale)) {
          r.normalized(p) = v / scale;
          if (std::abs(v / scale) > r.max_normalized) {
            r.max_normalized = std::abs(v / scale);
            r.argmax = p;
          }
        } else {
          r.normalized.set_valid(p, false);
        }
        return;
      } catch (const std::out_of_range&) {
      } catch (const std::domain_error&) {
      }
    }
    r.raw.set_valid(p, false);
    r.normalized.set_valid(p, false);
  });
  return r;
}

ResidualField kp_residual(const GridField& F, Accuracy acc) {
  BilinearEquation kp = make_equation(EquationId::KP);
  IndexBox box = interior_region(kp, F, acc);
  if (box.lo.a < 3 || box.hi.a > F.axis(1).size - 4) {
    box.lo.a = std::max(box.lo.a, 3);
    box.hi.a = std::min(box.hi.a, F.axis(1).size - 4);
  }
  if (box.hi.a < box.lo.a) throw std::out_of_range("KP residual needs a margin of 3 nodes on A");
  return residual_field(kp, F, box, acc);
}

}  // namespace kpz

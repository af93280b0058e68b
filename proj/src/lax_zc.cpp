#include "kpzlab/lax_zc.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kpz {

Jet Jet::constant(double v) {
  Jet j;
  j.c[0][0] = v;
  return j;
}

Jet Jet::dt() const {
  Jet r;
  for (int i = 0; i + 1 <= D; ++i)
    for (int j = 0; i + 1 + j <= D; ++j) r.c[i][j] = (i + 1) * c[i + 1][j];
  return r;
}

Jet Jet::da() const {
  Jet r;
  for (int i = 0; i <= D; ++i)
    for (int j = 0; i + j + 1 <= D; ++j) r.c[i][j] = (j + 1) * c[i][j + 1];
  return r;
}

Jet operator+(const Jet& x, const Jet& y) {
  Jet r;
  for (int i = 0; i <= Jet::D; ++i)
    for (int j = 0; i + j <= Jet::D; ++j) r.c[i][j] = x.c[i][j] + y.c[i][j];
  return r;
}

Jet operator-(const Jet& x, const Jet& y) { return x + (-1.0) * y; }

Jet operator*(double s, const Jet& x) {
  Jet r = x;
  for (auto& row : r.c)
    for (double& v : row) v *= s;
  return r;
}

Jet operator*(const Jet& x, const Jet& y) {
  Jet r;
  for (int i = 0; i <= Jet::D; ++i)
    for (int j = 0; i + j <= Jet::D; ++j)
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= j; ++l) r.c[i][j] += x.c[k][l] * y.c[i - k][j - l];
  return r;
}

Jet operator/(const Jet& x, const Jet& y) {
  if (y.c[0][0] == 0.0) throw std::domain_error("division by a vanishing field value");
  Jet q;
  for (int d = 0; d <= Jet::D; ++d)
    for (int i = 0; i <= d; ++i) {
      int j = d - i;
      double s = x.c[i][j];
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= j; ++l)
          if (k || l) s -= y.c[k][l] * q.c[i - k][j - l];
      q.c[i][j] = s / y.c[0][0];
    }
  return q;
}

namespace {

using Shift = std::array<int, 3>;

struct OpTerm {
  Shift shift;
  std::function<Jet(Index3)> coef;
};

struct Op {
  bool dt = false, da = false;
  std::vector<OpTerm> terms;
};

Index3 as_index(Shift s) { return {s[0], s[1], s[2]}; }
Shift add(Shift x, Shift y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2]}; }

std::map<Shift, double> commutator(const Op& A, const Op& B) {
  std::map<Shift, double> out;
  for (const OpTerm& x : A.terms)
    for (const OpTerm& y : B.terms) {
      Shift s = add(x.shift, y.shift);
      out[s] += x.coef({}).value() * y.coef(as_index(x.shift)).value();
      out[s] -= y.coef({}).value() * x.coef(as_index(y.shift)).value();
    }
  for (const OpTerm& y : B.terms) {
    if (A.dt) out[y.shift] += y.coef({}).dt().value();
    if (A.da) out[y.shift] += y.coef({}).da().value();
  }
  for (const OpTerm& x : A.terms) {
    if (B.dt) out[x.shift] -= x.coef({}).dt().value();
    if (B.da) out[x.shift] -= x.coef({}).da().value();
  }
  return out;
}

Jet at(const JetField& F, int t, int a, int n) { return F(Index3{t, a, n}); }

Op rbm_M(const JetField& F) {
  auto a_n = [F](int n) { return at(F, 0, 0, n + 1) * at(F, 0, 0, n - 1) / (at(F, 0, 0, n) * at(F, 0, 0, n)); };
  auto u = [F](int n) { return at(F, 0, 0, n).da() / at(F, 0, 0, n); };
  auto gu = [u](int n) { return 0.5 * (u(n + 1) - u(n - 1)); };
  Op M;
  M.dt = true;
  M.terms.push_back({{0, 0, -1}, [=](Index3 x) { return gu(x.n) * a_n(x.n); }});
  M.terms.push_back({{0, 0, -2}, [=](Index3 x) { return 0.5 * a_n(x.n) * a_n(x.n - 1); }});
  return M;
}

Op rbm_Mbar(const JetField& F) {
  Op B;
  B.da = true;
  B.terms.push_back({{0, 0, -1}, [F](Index3 x) {
                       return at(F, 0, 0, x.n + 1) * at(F, 0, 0, x.n - 1) / (at(F, 0, 0, x.n) * at(F, 0, 0, x.n));
                     }});
  return B;
}

Op tasep_M(const JetField& F) {
  auto r = [F](int a, int n) { return at(F, 0, a - 1, n + 1) / at(F, 0, a, n); };
  Op M;
  M.dt = true;
  // The printed operator carries a minus sign here; expanding [M, Mbar]
  // directly shows that only the plus sign yields r/r' (K' - K) e^{-d_n}.
  M.terms.push_back({{0, 1, -1}, [r](Index3 x) { return r(x.a, x.n) / r(x.a + 1, x.n - 1); }});
  return M;
}

Op tasep_Mbar(const JetField& F) {
  auto r = [F](int a, int n) { return at(F, 0, a - 1, n + 1) / at(F, 0, a, n); };
  Op B;
  B.terms.push_back({{0, -1, 0}, [](Index3) { return Jet::constant(1.0); }});
  B.terms.push_back({{0, 0, -1}, [r](Index3 x) { return r(x.a, x.n) / r(x.a, x.n - 1); }});
  return B;
}

Op parallel_M(const JetField& F, double c) {
  auto r = [F](int t, int a, int n) { return at(F, t + 1, a - 1, n + 1) / at(F, t, a, n); };
  Op M;
  M.terms.push_back({{1, 0, 0}, [](Index3) { return Jet::constant(1.0); }});
  M.terms.push_back({{0, 1, -1}, [r, c](Index3 x) { return -c * (r(x.t, x.a, x.n) / r(x.t, x.a + 1, x.n - 1)); }});
  return M;
}

Op parallel_Mbar(const JetField& F, double cbar) {
  auto r = [F](int t, int a, int n) { return at(F, t + 1, a - 1, n + 1) / at(F, t, a, n); };
  Op B;
  B.terms.push_back({{0, -1, 0}, [cbar](Index3) { return Jet::constant(-cbar); }});
  B.terms.push_back({{-1, 0, -1}, [r](Index3 x) { return r(x.t, x.a, x.n) / r(x.t - 1, x.a, x.n - 1); }});
  return B;
}

void require_zc(EquationId eq) {
  if (eq != EquationId::RBM && eq != EquationId::TASEP && eq != EquationId::Parallel)
    throw std::invalid_argument("zero-curvature forms exist for the rbm, tasep and parallel equations only");
}

// Extended lookup: levels n <= 0 outside the grid are 1.
struct GridLookup {
  const GridField& F;

  bool lower_extension(int n_index) const {
    return n_index < 0 && F.axis(2).at(n_index) <= 0.0;
  }

  double value(Index3 p) const {
    if (lower_extension(p.n)) return 1.0;
    if (!F.contains(p)) throw std::out_of_range("stencil leaves the grid");
    if (!F.valid(p)) throw std::domain_error("stencil touches an invalid value");
    return F(p);
  }

  double first(Index3 p, int axis) const {
    if (lower_extension(p.n)) return 0.0;
    if (axis == 0 && F.has(Channel::Dt)) return value(p), F.get(Channel::Dt, p);
    if (axis == 1 && F.has(Channel::Da)) return value(p), F.get(Channel::Da, p);
    Index3 e{};
    e[axis] = 1;
    return (value(p + e) - value(p - e)) / (2 * F.axis(axis).spacing);
  }

  double second_a(Index3 p) const {
    if (lower_extension(p.n)) return 0.0;
    if (F.has(Channel::Daa)) return value(p), F.get(Channel::Daa, p);
    Index3 e{0, 1, 0};
    double h = F.axis(1).spacing;
    return (value(p + e) - 2 * value(p) + value(p - e)) / (h * h);
  }

  Jet jet(Index3 p) const {
    Jet j = Jet::constant(value(p));
    if (F.axis(0).kind == AxisKind::Continuous) j.c[1][0] = first(p, 0);
    if (F.axis(1).kind == AxisKind::Continuous) {
      j.c[0][1] = first(p, 1);
      j.c[0][2] = 0.5 * second_a(p);
    }
    return j;
  }
};

}  // namespace

double expected_k(EquationId eq, double p) {
  switch (eq) {
    case EquationId::RBM: return 0.0;
    case EquationId::TASEP: return -1.0;
    case EquationId::Parallel: return 1.0 - p;
    default: require_zc(eq);
  }
  return 0.0;
}

Index3 k_shift(EquationId eq) {
  switch (eq) {
    case EquationId::RBM: return {0, 0, 1};
    case EquationId::TASEP: return {0, -1, 1};
    case EquationId::Parallel: return {1, -1, 1};
    default: require_zc(eq);
  }
  return {};
}

double k_value(EquationId eq, const JetField& F, Index3 x, double p) {
  require_zc(eq);
  auto f = [&](int t, int a, int n) { return F(x + Index3{t, a, n}); };
  Jet A = f(0, 0, 0), B = f(0, 0, -1);
  double AB = A.value() * B.value();
  if (AB == 0.0) throw std::domain_error("K is undefined where F vanishes");
  switch (eq) {
    case EquationId::RBM: {
      double Dt = A.dt().value() * B.value() - A.value() * B.dt().value();
      double Daa = A.da().da().value() * B.value() - 2 * A.da().value() * B.da().value() +
                   A.value() * B.da().da().value();
      return (Dt - 0.5 * Daa) / AB;
    }
    case EquationId::TASEP: {
      double Dt = A.dt().value() * B.value() - A.value() * B.dt().value();
      return (Dt - f(0, -1, 0).value() * f(0, 1, -1).value()) / AB;
    }
    default:
      return (f(1, 0, 0).value() * f(-1, 0, -1).value() - p * f(0, -1, 0).value() * f(0, 1, -1).value()) / AB;
  }
}

std::map<std::array<int, 3>, double> zc_commutator(EquationId eq, const JetField& F, double p, double c) {
  require_zc(eq);
  switch (eq) {
    case EquationId::RBM: return commutator(rbm_M(F), rbm_Mbar(F));
    case EquationId::TASEP: return commutator(tasep_M(F), tasep_Mbar(F));
    default: return commutator(parallel_M(F, c), parallel_Mbar(F, p / c));
  }
}

ZcEntry zc_entry(EquationId eq, const JetField& F, double p, double c) {
  auto comm = zc_commutator(eq, F, p, c);
  ZcEntry e;
  for (auto [s, v] : comm) {
    if (s == Shift{0, 0, -1}) e.commutator = v;
    else e.other = std::max(e.other, std::abs(v));
  }
  auto v = [&](int t, int a, int n) { return F(Index3{t, a, n}).value(); };
  switch (eq) {
    case EquationId::RBM: e.prefactor = v(0, 0, 1) * v(0, 0, -1) / (v(0, 0, 0) * v(0, 0, 0)); break;
    case EquationId::TASEP: {
      double r = v(0, -1, 1) / v(0, 0, 0), r1 = v(0, -1, 0) / v(0, 0, -1);
      e.prefactor = r / r1;
      break;
    }
    default: e.prefactor = v(1, -1, 1) * v(0, 0, -1) / (v(1, 0, 0) * v(0, -1, 0)); break;
  }
  e.dK = k_value(eq, F, k_shift(eq), p) - k_value(eq, F, {}, p);
  return e;
}

DerivedQuantities derived_quantities(const GridField& F) {
  DerivedQuantities d;
  const Axis &ta = F.axis(0), &aa = F.axis(1), &na = F.axis(2);
  d.a_n = GridField(ta, aa, na);
  d.u = d.grad_u = d.r_a = d.r_ta = d.a_n;
  d.has_u = aa.kind == AxisKind::Continuous;
  d.has_r_a = aa.kind == AxisKind::Discrete;
  d.has_r_ta = d.has_r_a && ta.kind == AxisKind::Discrete;
  GridLookup L{F};
  auto u_at = [&](Index3 p) { return L.first(p, 1) / L.value(p); };
  auto fill = [](GridField& g, Index3 p, auto&& fn) {
    try {
      double v = fn();
      if (!std::isfinite(v)) throw std::domain_error("non-finite");
      g(p) = v;
    } catch (const std::exception&) {
      g(p) = 0.0;
      g.set_valid(p, false);
    }
  };
  F.for_each([&](Index3 p) {
    Index3 up{0, 0, 1};
    fill(d.a_n, p, [&] {
      double f = L.value(p);
      if (f == 0.0) throw std::domain_error("vanishing F");
      return L.value(p + up) * L.value(p - up) / (f * f);
    });
    if (d.has_u) {
      fill(d.u, p, [&] { return u_at(p); });
      fill(d.grad_u, p, [&] { return 0.5 * (u_at(p + up) - u_at(p - up)); });
    } else {
      d.u.set_valid(p, false);
      d.grad_u.set_valid(p, false);
    }
    if (d.has_r_a) fill(d.r_a, p, [&] { return L.value(p + Index3{0, -1, 1}) / L.value(p); });
    else d.r_a.set_valid(p, false);
    if (d.has_r_ta) fill(d.r_ta, p, [&] { return L.value(p + Index3{1, -1, 1}) / L.value(p); });
    else d.r_ta.set_valid(p, false);
  });
  return d;
}

KField k_field(EquationId eq, const GridField& F, double p, Accuracy acc) {
  require_zc(eq);
  KField k;
  k.eq = eq;
  k.expected = expected_k(eq, p);
  k.K = GridField(F.axis(0), F.axis(1), F.axis(2));
  BilinearEquation bil = make_equation(eq, p);
  double c0 = 0.0;
  for (const BilinearTerm& term : bil.terms)
    if (term.shift == Index3{} && term.orders == Orders{0, 0, 0}) c0 += term.coeff;

  // Prepend two levels so the boundary extension F = 1 (n <= 0) is visible
  // to the residual stencils.
  const int pad = 2;
  Axis n_ext = Axis::discrete(std::lround(F.axis(2).origin) - pad, F.axis(2).size + pad);
  GridField E(F.axis(0), F.axis(1), n_ext);
  for (Channel ch : {Channel::Dt, Channel::Da, Channel::Daa})
    if (F.has(ch)) E.enable(ch);
  E.for_each([&](Index3 q) {
    Index3 p0 = q - Index3{0, 0, pad};
    if (p0.n >= 0) {
      E(q) = F(p0);
      E.set_valid(q, F.valid(p0));
      for (Channel ch : {Channel::Dt, Channel::Da, Channel::Daa})
        if (F.has(ch)) E.set(ch, q, F.get(ch, p0));
    } else if (n_ext.at(q.n) <= 0.0) {
      E(q) = 1.0;
    } else {
      E(q) = 0.0;
      E.set_valid(q, false);
    }
  });
  ResidualField r = residual_field(bil, E, interior_region(bil, E, acc), acc);
  F.for_each([&](Index3 p) {
    Index3 q = p + Index3{0, 0, pad};
    if (!r.normalized.valid(q) || !F.valid(p)) {
      k.K.set_valid(p, false);
      return;
    }
    double v = r.normalized(q) - c0;
    k.K(p) = v;
    ++k.count;
    double dev = std::abs(v - k.expected);
    if (dev > k.max_dev) {
      k.max_dev = dev;
      k.argmax = p;
    }
  });
  Index3 s = k_shift(eq);
  F.for_each([&](Index3 p) {
    Index3 q = p + s;
    if (!k.K.contains(q) || !k.K.valid(p) || !k.K.valid(q)) return;
    k.max_shift_diff = std::max(k.max_shift_diff, std::abs(k.K(q) - k.K(p)));
  });
  return k;
}

ZcReport zc_equivalence_check(EquationId eq, const GridField& F, double p) {
  require_zc(eq);
  ZcReport rep;
  rep.eq = eq;
  GridLookup L{F};
  F.for_each([&](Index3 base) {
    JetField jf = [&](Index3 off) { return L.jet(base + off); };
    try {
      ZcEntry e = zc_entry(eq, jf, p);
      ++rep.points;
      double scale = std::max({1.0, std::abs(e.commutator), std::abs(e.prefactor * e.dK)});
      double mis = std::abs(e.commutator - e.prefactor * e.dK) / scale;
      if (std::abs(e.commutator) > rep.max_entry) {
        rep.max_entry = std::abs(e.commutator);
        rep.argmax = base;
      }
      rep.max_mismatch = std::max(rep.max_mismatch, mis);
      rep.max_other = std::max(rep.max_other, e.other);
    } catch (const std::out_of_range&) {
    } catch (const std::domain_error&) {
    }
  });
  return rep;
}

}  // namespace kpz

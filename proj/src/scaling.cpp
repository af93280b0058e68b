#include "kpzlab/scaling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpz {

namespace {

constexpr AxisKind C = AxisKind::Continuous, D = AxisKind::Discrete;

struct Named {
  ScalingMap id;
  const char* name;
};

constexpr Named kNames[] = {
    {ScalingMap::RbmToKp, "rbm-kp"},          {ScalingMap::TasepToKp, "tasep-kp"},
    {ScalingMap::ParallelToKp, "parallel-kp"}, {ScalingMap::ParallelToRbm, "parallel-rbm"},
    {ScalingMap::ParallelToToda, "parallel-2dtl"}, {ScalingMap::ParallelToTasep, "parallel-tasep"},
    {ScalingMap::TasepToRbm, "tasep-rbm"},
};

bool is_kp(ScalingMap m) {
  return m == ScalingMap::RbmToKp || m == ScalingMap::TasepToKp || m == ScalingMap::ParallelToKp;
}

BilinearEquation source_equation(ScalingMap m, double eps, double p) {
  double ps = source_parameter(m, eps, p);
  switch (m) {
    case ScalingMap::RbmToKp: return make_equation(EquationId::RBM);
    case ScalingMap::TasepToKp:
    case ScalingMap::TasepToRbm: return make_equation(EquationId::TASEP);
    case ScalingMap::ParallelToToda: return make_hbde(1.0, -ps, -(1.0 - ps));
    default: return make_equation(EquationId::Parallel, ps);
  }
}

std::array<AxisKind, 3> target_kinds(EquationId target) {
  switch (target) {
    case EquationId::KP: return {C, C, C};
    case EquationId::TASEP: return {C, D, D};
    default: return {C, C, D};
  }
}

Axis local_axis(AxisKind kind, double centre, double h, int half) {
  if (kind == D) return Axis::discrete(std::lround(centre) - half, 2 * half + 1);
  return Axis::continuous(centre - half * h, h, 2 * half + 1);
}

void require_eps(double eps) {
  if (!(eps > 0)) throw std::invalid_argument("scaling parameter must be positive");
}

}  // namespace

std::string scaling_map_name(ScalingMap m) {
  for (const Named& n : kNames)
    if (n.id == m) return n.name;
  throw std::invalid_argument("unknown scaling map");
}

ScalingMap parse_scaling_map(const std::string& name) {
  for (const Named& n : kNames)
    if (name == n.name) return n.id;
  throw std::invalid_argument("unknown scaling map '" + name + "'");
}

std::vector<ScalingMap> all_scaling_maps() {
  std::vector<ScalingMap> out;
  for (const Named& n : kNames) out.push_back(n.id);
  return out;
}

MapInfo map_info(ScalingMap m, double p) {
  (void)p;
  switch (m) {
    case ScalingMap::RbmToKp: return {m, EquationId::RBM, EquationId::KP, 2, -0.5, {C, C, D}};
    case ScalingMap::TasepToKp: return {m, EquationId::TASEP, EquationId::KP, 2, -0.5, {C, D, D}};
    case ScalingMap::ParallelToKp: return {m, EquationId::Parallel, EquationId::KP, 2, -1.0, {D, D, D}};
    case ScalingMap::ParallelToRbm: return {m, EquationId::Parallel, EquationId::RBM, 2, 1.0, {D, D, D}};
    case ScalingMap::ParallelToToda: return {m, EquationId::HBDE, EquationId::Toda2D, 2, 1.0, {D, D, D}};
    case ScalingMap::ParallelToTasep: return {m, EquationId::Parallel, EquationId::TASEP, 1, 1.0, {D, D, D}};
    case ScalingMap::TasepToRbm: return {m, EquationId::TASEP, EquationId::RBM, 2, 1.0, {C, D, D}};
  }
  throw std::invalid_argument("unknown scaling map");
}

double source_parameter(ScalingMap m, double eps, double p) {
  switch (m) {
    case ScalingMap::ParallelToRbm:
    case ScalingMap::ParallelToTasep: return eps;
    case ScalingMap::ParallelToToda: return 1.0 - 4.0 * eps * eps;
    default: return p;
  }
}

std::array<double, 3> map_point(ScalingMap m, double t, double a, double n, double eps, double p) {
  require_eps(eps);
  const double se = std::sqrt(eps), e32 = eps * se;
  switch (m) {
    case ScalingMap::RbmToKp: return {e32 * t, 0.5 * eps * (t - n), -se * (t + a + n)};
    case ScalingMap::TasepToKp: return {0.5 * e32 * t, 0.5 * eps * (a + 2), se * (0.5 * t - 2 * n - a)};
    case ScalingMap::ParallelToKp: {
      if (!(p > 0 && p < 1)) throw std::invalid_argument("KP scaling of Parallel TASEP needs 0 < p < 1");
      const double q = 1 - p, pq4 = std::pow(p * q, 0.25);
      const double c1 = std::pow(p / (2 * q), 0.25), c2 = std::pow(2.0, 0.25) * (1 - std::sqrt(q)) / pq4,
                   c3 = 1 / std::sqrt(2 * p), c4 = std::pow(2.0, 0.25) / pq4;
      return {c1 * e32 * t, c3 * eps * (a + 2), se * (c2 * t - c4 * (2 * n + a))};
    }
    case ScalingMap::ParallelToRbm: return {eps * eps * t, se * (a - eps * t), n};
    case ScalingMap::ParallelToToda: return {eps * t, eps * a, n};
    case ScalingMap::ParallelToTasep: return {eps * t, a, n};
    case ScalingMap::TasepToRbm: return {eps * eps * t, eps * (a - t), n};
  }
  throw std::invalid_argument("unknown scaling map");
}

GridField pullback(ScalingMap m, const SmoothField& F, const Axis& t_axis, const Axis& a_axis, const Axis& n_axis,
                   double eps, double p) {
  require_eps(eps);
  MapInfo info = map_info(m, p);
  const Axis* axes[] = {&t_axis, &a_axis, &n_axis};
  for (int k = 0; k < 3; ++k)
    if (axes[k]->kind != info.source_kinds[k])
      throw std::invalid_argument("source grid axes do not match the equation of " + scaling_map_name(m));
  GridField G(t_axis, a_axis, n_axis);
  G.for_each([&](Index3 q) {
    auto c = G.coords(q);
    auto x = map_point(m, c[0], c[1], c[2], eps, p);
    double v = F(x[0], x[1], x[2]);
    if (!std::isfinite(v)) throw std::domain_error("smooth field is not finite at a mapped point");
    G(q) = v;
    G.set_valid(q, true);
  });
  return G;
}

std::array<double, 3> probe_source(ScalingMap m) {
  switch (m) {
    case ScalingMap::RbmToKp: return {0.0, -0.5, 1.0};
    case ScalingMap::TasepToKp: return {-2.0, -2.0, 1.0};
    case ScalingMap::ParallelToKp: return {0.0, -2.0, 1.0};
    case ScalingMap::ParallelToToda: return {0.0, 0.0, 0.0};
    default: return {0.0, 0.0, 2.0};
  }
}

std::array<double, 3> probe_image(ScalingMap m, double eps, double p) {
  auto s = probe_source(m);
  double level = is_kp(m) ? s[2] - 0.5 : s[2];
  return map_point(m, s[0], s[1], level, eps, p);
}

double target_residual(ScalingMap m, const SmoothField& F, const std::array<double, 3>& at) {
  MapInfo info = map_info(m);
  auto kinds = target_kinds(info.target);
  const double h = 0.02;
  const int half = 4;
  if (info.target == EquationId::KP) {
    // the KP registry form runs over (T, A, X)
    GridField G(local_axis(C, at[0], h, half), local_axis(C, at[2], h, half), local_axis(C, at[1], h, half));
    G.for_each([&](Index3 q) {
      auto c = G.coords(q);
      G(q) = F(c[0], c[2], c[1]);
      G.set_valid(q, true);
    });
    return residual_at(make_equation(EquationId::KP), G, {half, half, half}, Accuracy::Fourth);
  }
  GridField G(local_axis(kinds[0], at[0], h, half), local_axis(kinds[1], at[1], h, half),
              local_axis(kinds[2], at[2], h, half));
  G.for_each([&](Index3 q) {
    auto c = G.coords(q);
    G(q) = F(c[0], c[1], c[2]);
    G.set_valid(q, true);
  });
  BilinearEquation eq = make_equation(info.target);
  return residual_at(eq, G, {half, half, half}, Accuracy::Fourth);
}

double source_residual(ScalingMap m, const SmoothField& F, double eps, double p) {
  MapInfo info = map_info(m, p);
  auto s = probe_source(m);
  const double h = 0.1;
  const int half = 4;
  GridField G = pullback(m, F, local_axis(info.source_kinds[0], s[0], h, half),
                         local_axis(info.source_kinds[1], s[1], h, half),
                         local_axis(info.source_kinds[2], s[2], h, half), eps, p);
  return residual_at(source_equation(m, eps, p), G, {half, half, half}, Accuracy::Fourth);
}

std::vector<double> reciprocal_eps(const std::vector<int>& denominators) {
  std::vector<double> out;
  for (int k : denominators) {
    if (k <= 0) throw std::invalid_argument("denominators must be positive");
    out.push_back(1.0 / k);
  }
  return out;
}

std::vector<double> default_scaling_eps() { return reciprocal_eps({40, 160, 640, 2560, 10240}); }

RateReport scaling_rate(ScalingMap m, const SmoothField& F, const std::vector<double>& eps_list, double p) {
  if (eps_list.size() < 4) throw std::invalid_argument("rate fits need at least four values of eps");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("eps values must decrease");
  MapInfo info = map_info(m, p);
  RateReport rep;
  rep.map = m;
  rep.expected_order = info.order;
  rep.coefficient = info.coefficient;

  // residuals below this are rounding noise of O(1) products
  auto img0 = probe_image(m, eps_list.front(), p);
  const double scale = std::max(1.0, std::abs(F(img0[0], img0[1], img0[2])));
  const double floor = 1e-13 * scale * scale;
  bool all_below = true, target_zero = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double eps : eps_list) {
    RateRow row;
    row.eps = eps;
    row.residual = source_residual(m, F, eps, p);
    row.target_residual = target_residual(m, F, probe_image(m, eps, p));
    double lead = info.coefficient * std::pow(eps, info.order) * row.target_residual;
    row.ratio = lead != 0.0 ? row.residual / lead : std::numeric_limits<double>::quiet_NaN();
    if (std::abs(row.residual) > floor) all_below = false;
    if (std::abs(row.target_residual) > 1e-8 * scale * scale) target_zero = false;
    double x = std::log(eps), y = std::log(std::max(std::abs(row.residual), 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    rep.rows.push_back(row);
  }
  const double k = static_cast<double>(eps_list.size());
  rep.exponent = all_below ? std::numeric_limits<double>::infinity() : (k * sxy - sx * sy) / (k * sxx - sx * sx);
  rep.target_vanishes = target_zero;
  if (target_zero) {
    // with no leading term the residual must sit at rounding level or far
    // below eps^order
    rep.faster_than_leading = true;
    for (const RateRow& row : rep.rows)
      if (std::abs(row.residual) > std::max(floor, 1e-6 * std::pow(row.eps, info.order) * scale * scale))
        rep.faster_than_leading = false;
  } else {
    rep.faster_than_leading = all_below || rep.exponent > info.order + 0.1;
  }
  if (target_zero && !rep.faster_than_leading)
    throw std::domain_error("target residual vanishes at the probe but the source residual does not decay faster");
  return rep;
}

HbdeReport hbde_equivalence(const GridField& F, double p) {
  if (F.axis(0).kind != D || F.axis(1).kind != D || F.axis(2).kind != D)
    throw std::invalid_argument("HBDE reindexing needs a discrete (t, a, n) lattice");
  BilinearEquation par = make_equation(EquationId::Parallel, p);
  BilinearEquation hb = make_hbde(1.0, -p, -(1.0 - p));

  const long t0 = std::lround(F.axis(0).origin), a0 = std::lround(F.axis(1).origin),
             n0 = std::lround(F.axis(2).origin);
  const int nt = F.axis(0).size, na = F.axis(1).size, nn = F.axis(2).size;
  // r = t - x - m with m in [2 n0 - 2, 2 (n0 + nn - 1) - 1]
  const long m_lo = 2 * n0 - 2, m_hi = 2 * (n0 + nn - 1) - 1;
  const long r_lo = t0 - (a0 + na - 1) - m_hi, r_hi = (t0 + nt - 1) - a0 - m_lo;
  GridField G(F.axis(0), F.axis(1), Axis::discrete(r_lo, static_cast<int>(r_hi - r_lo + 1)));
  G.for_each([&](Index3 q) {
    auto c = G.coords(q);
    long m = std::lround(c[0] - c[1] - c[2]);
    long n = static_cast<long>(std::floor(m / 2.0)) + 1;
    Index3 src{q.t, q.a, static_cast<int>(n - n0)};
    if (src.n >= 0 && src.n < nn && F.valid(src)) {
      G(q) = F(src);
    } else {
      G(q) = 0.0;
      G.set_valid(q, false);
    }
  });

  ResidualField rp = residual_field(par, F, F.box());
  ResidualField rh = residual_field(hb, G, G.box());
  HbdeReport rep;
  F.for_each([&](Index3 q) {
    if (!rp.raw.valid(q)) return;
    auto c = F.coords(q);
    long m = 2 * std::lround(c[2]) - 2;
    long r = std::lround(c[0] - c[1]) - m;
    Index3 g{q.t, q.a, static_cast<int>(r - r_lo)};
    if (!G.contains(g) || !rh.raw.valid(g)) return;
    ++rep.points;
    rep.max_parallel = std::max(rep.max_parallel, std::abs(rp.raw(q)));
    rep.max_hbde = std::max(rep.max_hbde, std::abs(rh.raw(g)));
    rep.max_deviation = std::max(rep.max_deviation, std::abs(rp.raw(q) - rh.raw(g)));
  });
  if (rep.points == 0) throw std::out_of_range("grid too small for both stencils");
  return rep;
}

}  // namespace kpz

#include "kpzlab/hierarchy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kpz {

namespace {

using Levels = std::vector<Eigen::ArrayXd>;

GridField make_output(const Axis& t_axis, const Axis& a_axis, int n_lo, int n_hi) {
  if (n_hi < n_lo) throw std::invalid_argument("empty level range");
  return GridField(t_axis, a_axis, Axis::discrete(n_lo, n_hi - n_lo + 1));
}

void check_levels(const InitialData& y, int n_hi) {
  if (n_hi > y.size()) throw std::invalid_argument("requested level exceeds the number of particles");
}

bool check_monotone(const GridField& F) {
  bool ok = true;
  Index3 s = F.shape();
  for (int i = 0; i < s.t; ++i)
    for (int k = 0; k < s.n; ++k)
      for (int j = 1; j < s.a; ++j) {
        Index3 p{i, j, k}, q{i, j - 1, k};
        if (F.valid(p) && F.valid(q) && F(p) > F(q) + 1e-12) ok = false;
      }
  return ok;
}

long count_invalid(const GridField& F) { return static_cast<long>(F.values().size()) - F.valid_count(); }

// ---- lattice ratio ODEs ---------------------------------------------------

struct LatticeRatio {
  Model model;
  int N;
  long lo;
  int M;
  const std::optional<Wall>* wall;

  long a_of(int i) const { return lo + i; }

  void rhs(const Levels& g, double t, Levels& out) const {
    Eigen::ArrayXd rho = Eigen::ArrayXd::Ones(M), next(M);
    const bool push = model == Model::PushTASEP;
    long b = (wall && *wall) ? (*wall)->lattice_at(t) : 0;
    for (int n = 0; n < N; ++n) {
      const Eigen::ArrayXd& gn = g[n];
      for (int i = 0; i < M; ++i) {
        double nb = push ? (i + 1 < M ? gn(i + 1) : 0.0) : (i > 0 ? gn(i - 1) : 1.0);
        out[n](i) = rho(i) * nb - gn(i);
      }
      if (wall && *wall)
        for (int i = 0; i < M; ++i)
          if (a_of(i) >= b - (n + 1)) out[n](i) = 0.0;
      if (n + 1 == N) break;
      for (int i = 0; i < M; ++i) {
        double c = gn(i);
        double l = push ? c : (i > 0 ? gn(i - 1) : 1.0);
        double r = push ? (i + 2 < M ? gn(i + 2) : 0.0) : (i + 1 < M ? gn(i + 1) : 0.0);
        double mid = push ? (i + 1 < M ? gn(i + 1) : 0.0) : c;
        double den = mid * mid;
        double factor = den > 1e-300 ? l * r / den : 0.0;
        next(i) = push ? (i + 1 < M ? rho(i + 1) : 0.0) * factor : rho(i) * factor;
      }
      rho.swap(next);
    }
  }

  void apply_wall(Levels& g, double t) const {
    if (!(wall && *wall)) return;
    long b = (*wall)->lattice_at(t);
    for (int n = 0; n < N; ++n)
      for (int i = 0; i < M; ++i)
        if (a_of(i) >= b - (n + 1)) g[n](i) = 0.0;
  }

  void advance(Levels& g, double t0, double t1, double dt) const {
    if (t1 <= t0) return;
    long steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
    double h = (t1 - t0) / steps;
    Levels k1 = g, k2 = g, k3 = g, k4 = g, tmp = g;
    double tm = 0.5 * (t0 + t1);  // wall is constant on the segment
    for (long s = 0; s < steps; ++s) {
      rhs(g, tm, k1);
      for (int n = 0; n < N; ++n) tmp[n] = g[n] + 0.5 * h * k1[n];
      rhs(tmp, tm, k2);
      for (int n = 0; n < N; ++n) tmp[n] = g[n] + 0.5 * h * k2[n];
      rhs(tmp, tm, k3);
      for (int n = 0; n < N; ++n) tmp[n] = g[n] + h * k3[n];
      rhs(tmp, tm, k4);
      for (int n = 0; n < N; ++n) g[n] += h / 6 * (k1[n] + 2 * k2[n] + 2 * k3[n] + k4[n]);
    }
  }

  // F_n and dF_n/dt on the internal grid from the ratios.
  void assemble(const Levels& g, const Levels& dg, Levels& F, Levels& D) const {
    Eigen::ArrayXd f = Eigen::ArrayXd::Ones(M), d = Eigen::ArrayXd::Zero(M);
    F.assign(N, Eigen::ArrayXd());
    D.assign(N, Eigen::ArrayXd());
    for (int n = 0; n < N; ++n) {
      Eigen::ArrayXd fs = f, ds = d;
      if (model == Model::PushTASEP && n > 0)
        for (int i = 0; i < M; ++i) {
          fs(i) = i + 1 < M ? f(i + 1) : 0.0;
          ds(i) = i + 1 < M ? d(i + 1) : 0.0;
        }
      F[n] = g[n] * fs;
      D[n] = dg[n] * fs + g[n] * ds;
      f = F[n];
      d = D[n];
    }
  }
};

HierarchyResult evolve_lattice(Model eq, const InitialData& y, const std::optional<Wall>& wall, const Axis& t_axis,
                               const Axis& a_axis, int n_lo, int n_hi, const ContinuousScheme& sc) {
  validate(y, eq);
  if (wall && eq != Model::TASEP) throw std::invalid_argument("walls are supported for rbm and tasep only");
  if (wall && !(wall->start > y.at(1))) throw std::invalid_argument("TASEP wall must start right of particle 1");
  const int N = std::max(n_hi, 1);
  check_levels(y, n_hi);
  const double T = t_axis.at(t_axis.size - 1);
  if (t_axis.at(0) < 0) throw std::invalid_argument("times must be non-negative");
  long a_lo = static_cast<long>(std::floor(a_axis.at(0))), a_hi = static_cast<long>(std::ceil(a_axis.at(a_axis.size - 1)));
  long lo, hi;
  if (eq == Model::TASEP) {
    double K = T + 10 * std::sqrt(T) + 20;
    lo = std::min(a_lo, y.lattice(N) - 1);
    hi = std::max(a_hi, y.lattice(1) + static_cast<long>(std::ceil(K)));
    if (wall) hi = std::min(std::max(a_hi, wall->lattice_at(T)), hi);
  } else {
    double K = N * T + 10 * std::sqrt(N * T) + 20;
    lo = std::min(a_lo, y.lattice(N) - static_cast<long>(std::ceil(K)));
    hi = std::max(a_hi, y.lattice(1));
  }
  LatticeRatio ode{eq, N, lo, static_cast<int>(hi - lo + 1), &wall};

  Levels g(N, Eigen::ArrayXd::Zero(ode.M));
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < ode.M; ++i) g[n](i) = ode.a_of(i) < y.lattice(n + 1) ? 1.0 : 0.0;

  HierarchyResult res;
  res.F = make_output(t_axis, a_axis, n_lo, n_hi);
  res.F.enable(Channel::Dt);
  res.scheme = "ratio ODE, RK4, dt = " + std::to_string(sc.dt);

  std::vector<double> events;
  if (wall)
    for (double s : wall->jumps)
      if (s > 0 && s < T) events.push_back(s);
  double now = 0.0;
  Levels dg = g, F, D;
  for (int it = 0; it < t_axis.size; ++it) {
    double target = t_axis.at(it);
    for (double s : events)
      if (s > now && s < target) {
        ode.advance(g, now, s, sc.dt);
        now = s;
      }
    ode.advance(g, now, target, sc.dt);
    now = target;
    ode.apply_wall(g, now);
    ode.rhs(g, now, dg);
    ode.assemble(g, dg, F, D);
    for (int j = 0; j < a_axis.size; ++j) {
      long a = std::lround(a_axis.at(j));
      for (int k = 0; k < n_hi - n_lo + 1; ++k) {
        int n = n_lo + k;
        Index3 p{it, j, k};
        double v = 1.0, d = 0.0;
        if (n >= 1) {
          if (a < lo) v = eq == Model::TASEP ? (a < y.lattice(n) ? 1.0 : 0.0) : 1.0;
          else if (a > hi) v = 0.0;
          else {
            v = F[n - 1](a - lo);
            d = D[n - 1](a - lo);
          }
        }
        res.F(p) = v;
        res.F.set(Channel::Dt, p, d);
      }
    }
  }
  res.monotone = check_monotone(res.F);
  return res;
}

// ---- RBM in similarity variables -----------------------------------------

struct Similarity {
  int N;
  int M;
  double h;
  double xi0;
  double c;
  double log_floor;
  bool wall;

  // Returns per-level clip masks (true where level n may not be trusted).
  std::vector<std::vector<char>> rhs(const Levels& g, double t, Levels& out) const {
    std::vector<std::vector<char>> masks(N);
    Eigen::ArrayXd V = Eigen::ArrayXd::Zero(M), logF = Eigen::ArrayXd::Zero(M), lg(M);
    std::vector<char> clip(M, 0), wide(M, 0);
    const double sq = std::sqrt(t);
    for (int n = 0; n < N; ++n) {
      const Eigen::ArrayXd& gi = g[n];
      out[n].setZero();
      for (int i = 1; i + 1 < M; ++i) {
        if (clip[i]) continue;
        double xi = xi0 + i * h;
        double d2 = (gi(i + 1) - 2 * gi(i) + gi(i - 1)) / (h * h);
        double d1 = (gi(i + 1) - gi(i - 1)) / (2 * h);
        out[n](i) = 0.5 * d2 + (0.5 * xi + c * sq) * d1 + V(i) * gi(i);
      }
      masks[n] = clip;
      for (int i = 0; i < M; ++i) {
        lg(i) = std::log(std::max(gi(i), 1e-300));
        logF(i) += lg(i);
        if (logF(i) < log_floor) clip[i] = 1;
      }
      for (int i = 0; i < M; ++i) wide[i] = clip[i] || (i > 0 && clip[i - 1]) || (i + 1 < M && clip[i + 1]);
      clip = wide;
      for (int i = 0; i < M; ++i) {
        if (clip[i] || i == 0 || i + 1 == M) {
          V(i) = 0.0;
          continue;
        }
        V(i) += (lg(i + 1) - 2 * lg(i) + lg(i - 1)) / (h * h);
      }
    }
    return masks;
  }

  void advance(Levels& g, double s0, double s1) const {
    Levels k1 = g, k2 = g, k3 = g, k4 = g, tmp = g;
    const double ds_max = 0.25 * h * h;
    double s = s0;
    while (s < s1 - 1e-15) {
      double ds = std::min(ds_max, s1 - s);
      rhs(g, std::exp(s), k1);
      for (int n = 0; n < N; ++n) tmp[n] = g[n] + 0.5 * ds * k1[n];
      rhs(tmp, std::exp(s + 0.5 * ds), k2);
      for (int n = 0; n < N; ++n) tmp[n] = g[n] + 0.5 * ds * k2[n];
      rhs(tmp, std::exp(s + 0.5 * ds), k3);
      for (int n = 0; n < N; ++n) tmp[n] = g[n] + ds * k3[n];
      rhs(tmp, std::exp(s + ds), k4);
      for (int n = 0; n < N; ++n) g[n] += ds / 6 * (k1[n] + 2 * k2[n] + 2 * k3[n] + k4[n]);
      s += ds;
    }
  }
};

double linear_wall_slope(const Wall& w) {
  if (w.times.empty() || w.times.size() != w.values.size() || w.times.front() != 0 || w.values.front() != 0)
    throw std::invalid_argument("RBM wall must be sampled from b(0) = 0");
  if (w.times.size() == 1) return 0.0;
  double c = w.values.back() / w.times.back();
  for (std::size_t i = 0; i < w.times.size(); ++i)
    if (std::abs(w.values[i] - c * w.times[i]) > 1e-12 * (1 + std::abs(w.values[i])))
      throw std::invalid_argument("the RBM hierarchy solver supports linear walls b(t) = c t only");
  return c;
}

HierarchyResult evolve_rbm(const InitialData& y, const std::optional<Wall>& wall, const Axis& t_axis,
                           const Axis& a_axis, int n_lo, int n_hi, const ContinuousScheme& sc) {
  validate(y, Model::RBM);
  check_levels(y, n_hi);
  const int N = std::max(n_hi, 1);
  const double y0 = y.at(1);
  for (int k = 1; k <= N; ++k)
    if (y.at(k) != y0) throw std::invalid_argument("the RBM hierarchy solver needs packed initial data");
  double c = 0.0;
  if (wall) {
    c = linear_wall_slope(*wall);
    if (y0 != 0.0) throw std::invalid_argument("packed data must sit at the wall, y = 0");
  }
  const bool has_wall = wall.has_value();
  const double h = sc.h, L = sc.xi_max;
  const int M = static_cast<int>(std::lround((has_wall ? L : 2 * L) / h)) + 1;
  Similarity sim{N, M, h, -L, c, std::log(sc.floor), has_wall};

  Levels g(N, Eigen::ArrayXd(M));
  for (int i = 0; i < M; ++i) {
    double xi = -L + i * h;
    double phi = 0.5 * std::erfc(xi / std::sqrt(2.0));
    double v = has_wall ? std::clamp(2 * phi - 1, 0.0, 1.0) : phi;
    if (has_wall && i == M - 1) v = 0.0;
    for (int n = 0; n < N; ++n) g[n](i) = v;
  }

  HierarchyResult res;
  res.F = make_output(t_axis, a_axis, n_lo, n_hi);
  res.scheme = "similarity variables, RK4 in log t, h = " + std::to_string(h);
  double s = std::log(sc.t_start);
  Levels tmp = g;
  for (int it = 0; it < t_axis.size; ++it) {
    double t = t_axis.at(it);
    if (t < 0) throw std::invalid_argument("times must be non-negative");
    if (t <= 0) {
      for (int j = 0; j < a_axis.size; ++j)
        for (int k = 0; k < n_hi - n_lo + 1; ++k)
          res.F(Index3{it, j, k}) = (n_lo + k <= 0 || y0 > a_axis.at(j)) ? 1.0 : 0.0;
      continue;
    }
    double target = std::log(t);
    if (target > s) {
      sim.advance(g, s, target);
      s = target;
    }
    auto masks = sim.rhs(g, t, tmp);
    Levels F(N);
    Eigen::ArrayXd run = Eigen::ArrayXd::Ones(M);
    for (int n = 0; n < N; ++n) F[n] = run = run * g[n];
    const double sq = std::sqrt(t);
    for (int j = 0; j < a_axis.size; ++j) {
      double xi = (a_axis.at(j) - y0 - c * t) / sq;
      for (int k = 0; k < n_hi - n_lo + 1; ++k) {
        int n = n_lo + k;
        Index3 p{it, j, k};
        if (n <= 0) {
          res.F(p) = 1.0;
          continue;
        }
        double pos = (xi + L) / h;
        if (pos <= 0) {
          res.F(p) = 1.0;
          continue;
        }
        if (pos >= M - 1) {
          res.F(p) = 0.0;
          continue;
        }
        int i0 = std::clamp(static_cast<int>(std::floor(pos)) - 1, 0, M - 4);
        double v = 0.0;
        bool ok = true;
        for (int m = 0; m < 4; ++m) {
          double w = 1.0;
          for (int l = 0; l < 4; ++l)
            if (l != m) w *= (pos - (i0 + l)) / static_cast<double>(m - l);
          v += w * F[n - 1](i0 + m);
          if (masks[n - 1][i0 + m]) ok = false;
        }
        res.F(p) = ok ? std::clamp(v, 0.0, 1.0) : 0.0;
        res.F.set_valid(p, ok);
      }
    }
  }
  res.monotone = check_monotone(res.F);
  res.invalid = count_invalid(res.F);
  return res;
}

// ---- discrete recursions --------------------------------------------------

struct DiscreteLayers {
  Model model;
  const InitialData* y;
  int N;
  long lo, hi;
  std::vector<Eigen::ArrayXXd> F;                       // per time: N x M
  std::vector<Eigen::Array<char, Eigen::Dynamic, Eigen::Dynamic>> ok;

  int M() const { return static_cast<int>(hi - lo + 1); }

  // Returns the value and whether it is trustworthy.
  std::pair<double, bool> get(long t, long a, int n) const {
    if (n <= 0) return {1.0, true};
    long yn = y->lattice(n);
    bool right_moving = model != Model::Pushing;
    if (right_moving) {
      if (a < yn) return {1.0, true};
      if (a >= yn + t) return {0.0, true};
    } else {
      if (a >= yn) return {0.0, true};
      if (a < yn - t) return {1.0, true};
    }
    if (a < lo || a > hi) throw std::logic_error("recursion grid too small");
    return {F[t](n - 1, a - lo), ok[t](n - 1, a - lo) != 0};
  }

  void add_layer() {
    F.emplace_back(Eigen::ArrayXXd::Zero(N, M()));
    ok.emplace_back(Eigen::Array<char, Eigen::Dynamic, Eigen::Dynamic>::Ones(N, M()));
  }
};

}  // namespace

HierarchyResult evolve_continuous(Model eq, const InitialData& y, const std::optional<Wall>& wall,
                                  const Axis& t_axis, const Axis& a_axis, int n_lo, int n_hi,
                                  const ContinuousScheme& scheme) {
  switch (eq) {
    case Model::TASEP:
    case Model::PushTASEP: return evolve_lattice(eq, y, wall, t_axis, a_axis, n_lo, n_hi, scheme);
    case Model::RBM: return evolve_rbm(y, wall, t_axis, a_axis, n_lo, n_hi, scheme);
    default: throw std::invalid_argument("evolve_continuous handles rbm, tasep and push-tasep");
  }
}

HierarchyResult recurse_discrete(Model eq, const InitialData& y, double pq, const Axis& t_axis, const Axis& a_axis,
                                 int n_lo, int n_hi, const DiscreteScheme& scheme) {
  if (!is_discrete_time(eq)) throw std::invalid_argument("recurse_discrete handles parallel, blocking and pushing");
  validate(y, eq);
  check_levels(y, n_hi);
  if (pq < 0 || pq > 1) throw std::invalid_argument("jump probability must lie in [0, 1]");
  if (t_axis.kind != AxisKind::Discrete || a_axis.kind != AxisKind::Discrete)
    throw std::invalid_argument("discrete recursions need integer t and a axes");
  if (t_axis.at(0) < 0) throw std::invalid_argument("times must be non-negative");
  const int N = std::max(n_hi, 1);
  const long T = std::lround(t_axis.at(t_axis.size - 1));
  DiscreteLayers L{eq, &y, N, 0, 0, {}, {}};
  L.lo = std::min<long>(std::lround(a_axis.at(0)), y.lattice(N) - T - 1);
  L.hi = std::max<long>(std::lround(a_axis.at(a_axis.size - 1)), y.lattice(1) + T + 1);

  L.add_layer();
  for (int n = 1; n <= N; ++n)
    for (long a = L.lo; a <= L.hi; ++a) L.F[0](n - 1, a - L.lo) = y.lattice(n) > a ? 1.0 : 0.0;

  const double p = pq, q = 1 - pq;
  double worst = 0.0;
  long t_begin = 0;
  if (eq == Model::Parallel && T >= 1) {
    // one step from y: particle n moves iff its coin is heads and the site ahead is empty
    L.add_layer();
    for (int n = 1; n <= N; ++n) {
      bool free = n == 1 || y.lattice(n - 1) != y.lattice(n) + 1;
      for (long a = L.lo; a <= L.hi; ++a)
        L.F[1](n - 1, a - L.lo) = (y.lattice(n) > a ? 1.0 : 0.0) + (free && y.lattice(n) == a ? p : 0.0);
    }
    t_begin = 1;
  }
  for (long t = t_begin; t < T; ++t) {
    L.add_layer();
    for (int n = 1; n <= N; ++n)
      for (long a = L.lo; a <= L.hi; ++a) {
        std::pair<double, bool> A, B, C, D, den;
        double c1 = p, c2 = q;
        switch (eq) {
          case Model::Parallel:
            A = L.get(t, a - 1, n), B = L.get(t, a + 1, n - 1), C = L.get(t, a, n), D = L.get(t, a, n - 1);
            den = L.get(t - 1, a, n - 1);
            break;
          case Model::Blocking:
            A = L.get(t, a - 1, n), B = L.get(t + 1, a + 1, n - 1), C = L.get(t, a, n), D = L.get(t + 1, a, n - 1);
            den = L.get(t, a, n - 1);
            break;
          default:
            A = L.get(t, a + 1, n), B = L.get(t + 1, a, n - 1), C = L.get(t, a, n), D = L.get(t + 1, a + 1, n - 1);
            den = L.get(t, a + 1, n - 1);
            break;
        }
        double t1 = c1 * A.first * B.first, t2 = c2 * C.first * D.first;
        double num = t1 + t2;
        bool inputs_ok = A.second && B.second && C.second && D.second && den.second;
        double& out = L.F[t + 1](n - 1, a - L.lo);
        char& flag = L.ok[t + 1](n - 1, a - L.lo);
        if (!inputs_ok) {
          out = 0.0;
          flag = 0;
        } else if (num == 0.0) {
          out = 0.0;
        } else if (den.first < scheme.floor) {
          out = 0.0;
          flag = 0;
        } else {
          out = num / den.first;
          double scale = std::max({std::abs(out * den.first), std::abs(t1), std::abs(t2)});
          worst = std::max(worst, std::abs(out * den.first - num) / scale);
        }
      }
  }

  HierarchyResult res;
  res.F = make_output(t_axis, a_axis, n_lo, n_hi);
  res.scheme = std::string("F-form recursion, floor = ") + std::to_string(scheme.floor);
  res.relation_residual = worst;
  for (int it = 0; it < t_axis.size; ++it)
    for (int j = 0; j < a_axis.size; ++j)
      for (int k = 0; k < n_hi - n_lo + 1; ++k) {
        auto [v, good] = L.get(std::lround(t_axis.at(it)), std::lround(a_axis.at(j)), n_lo + k);
        Index3 pt{it, j, k};
        res.F(pt) = good ? v : 0.0;
        res.F.set_valid(pt, good);
      }
  res.monotone = check_monotone(res.F);
  res.invalid = count_invalid(res.F);
  return res;
}

HierarchyResult solve_hierarchy(Model eq, const InitialData& y, const std::optional<Wall>& wall, double pq,
                                const Axis& t_axis, const Axis& a_axis, int n_lo, int n_hi) {
  if (is_discrete_time(eq)) {
    if (wall) throw std::invalid_argument("walls are not supported for discrete-time models");
    return recurse_discrete(eq, y, pq, t_axis, a_axis, n_lo, n_hi);
  }
  return evolve_continuous(eq, y, wall, t_axis, a_axis, n_lo, n_hi);
}

}  // namespace kpz

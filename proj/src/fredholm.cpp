#include "kpzlab/fredholm.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <utility>

#include "kpzlab/quadrature.hpp"
#include "kpzlab/specfun.hpp"
#include "kpzlab/walkfun.hpp"

namespace kpz {

namespace {

double pow2(long e) { return std::ldexp(1.0, static_cast<int>(e)); }

long as_lattice(double x, const char* what) {
  if (x != std::floor(x)) throw std::invalid_argument(std::string(what) + " must be an integer");
  return static_cast<long>(x);
}

long push_tail_steps(double t, int n, double tail) {
  double bound = tail * std::ldexp(1.0, -n);
  double term = 1.0;
  long m = 0;
  while (term >= bound) {
    ++m;
    term *= t / m;
  }
  return m;
}

long lattice_extra(const KernelAssembly& k) {
  if (k.model == Model::Pushing) return static_cast<long>(k.t);
  if (k.model == Model::PushTASEP) return push_tail_steps(k.t, k.n, k.disc.push_tail);
  return 0;
}

double rbm_R(double t, const Discretization& d) {
  return d.rbm_R > 0 ? d.rbm_R : std::max(8.0 * std::sqrt(t), 8.0);
}

double rbm_width(double t, const Discretization& d) {
  return d.rbm_panel_width > 0 ? d.rbm_panel_width : std::sqrt(t);
}

// Conjugated lattice phi for a fixed level, reusing the absorption law per node.
class LatticePhi {
 public:
  LatticePhi(const KernelAssembly& k, int m) : k_(k), m_(m) {
    if (m < 1) return;
    laws_.reserve(k.nodes.size());
    for (Eigen::Index j = 0; j < k.nodes.size(); ++j)
      laws_.push_back(absorption_law(k.model, k.y, m, static_cast<long>(k.nodes(j)),
                                     k.disc.p_or_q));
  }

  Eigen::VectorXd operator()(long r) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(k_.nodes.size());
    if (m_ < 1) return out;
    const long a = static_cast<long>(k_.a);
    for (Eigen::Index j = 0; j < k_.nodes.size(); ++j) {
      long v = static_cast<long>(k_.nodes(j));
      double acc = 0.0;
      for (const Absorption& ab : laws_[j])
        acc += ab.weight * pow2(v - ab.x) * phibar(r - ab.x, m_ - ab.step);
      out(j) = pow2(r - a) * acc;
    }
    return out;
  }

 private:
  double phibar(long d, int level) {
    auto key = std::make_pair(d, level);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double v = model_basis_unscaled(k_.model, BasisKind::Phibar, k_.t, d, level, 0, k_.disc.p_or_q);
    cache_.emplace(key, v);
    return v;
  }

  const KernelAssembly& k_;
  int m_;
  std::vector<std::vector<Absorption>> laws_;
  std::map<std::pair<long, int>, double> cache_;
};

Eigen::VectorXd lattice_psi(const KernelAssembly& k, long r, int m) {
  Eigen::VectorXd out(k.nodes.size());
  const long a = static_cast<long>(k.a);
  for (Eigen::Index i = 0; i < k.nodes.size(); ++i) {
    long u = static_cast<long>(k.nodes(i));
    out(i) = pow2(a - r) *
             model_basis_unscaled(k.model, BasisKind::Phi, k.t, r, m, u, k.disc.p_or_q);
  }
  return out;
}

void assemble_lattice(KernelAssembly& k) {
  const long a = as_lattice(k.a, "a");
  const long yn = k.y.lattice(k.n);
  const long extra = lattice_extra(k);
  const long lo = yn + 1, hi = a + k.n + extra;
  const long rlo = lo - k.n - extra;
  k.trunc = {static_cast<double>(lo), static_cast<double>(hi), static_cast<double>(rlo),
             static_cast<double>(a), k.model == Model::PushTASEP ? k.disc.push_tail : 0.0};
  if (hi < lo || a < rlo) return;
  const long size = hi - lo + 1, nr = a - rlo + 1;
  k.nodes.resize(size);
  for (long i = 0; i < size; ++i) k.nodes(i) = static_cast<double>(lo + i);
  k.weights = Eigen::VectorXd::Ones(size);
  k.r_nodes.resize(nr);
  for (long j = 0; j < nr; ++j) k.r_nodes(j) = static_cast<double>(rlo + j);
  k.r_weights = Eigen::VectorXd::Ones(nr);
  k.psi.resize(size, nr);
  k.phi.resize(nr, size);
  LatticePhi phi(k, k.n);
  for (long j = 0; j < nr; ++j) {
    long r = rlo + j;
    k.psi.col(j) = lattice_psi(k, r, k.n);
    k.phi.row(j) = phi(r).transpose();
  }
}

void assemble_rbm(KernelAssembly& k) {
  if (!(k.t > 0)) throw std::invalid_argument("RBM kernel needs t > 0");
  const double R = rbm_R(k.t, k.disc), width = rbm_width(k.t, k.disc);
  const int m = k.disc.rbm_nodes_per_panel;
  std::vector<double> edges;
  for (int j = k.n; j >= 1; --j)
    if (edges.empty() || k.y.at(j) > edges.back()) edges.push_back(k.y.at(j));
  const double top = std::max(edges.back(), k.a) + R;
  edges.push_back(top);
  QuadRule u = composite_rule(edges, width, m);
  const double rlo = std::min(k.a, k.y.at(k.n)) - R;
  QuadRule r = composite_rule({rlo, k.a}, width, m);
  k.nodes = u.x;
  k.weights = u.w;
  k.r_nodes = r.x;
  k.r_weights = r.w;
  k.trunc = {edges.front(), top, rlo, k.a, std::exp(-R * R / (2 * k.t))};
  const Eigen::Index nu = u.x.size(), nr = r.x.size();
  k.psi.resize(nu, nr);
  k.phi.resize(nr, nu);
  for (Eigen::Index j = 0; j < nr; ++j) {
    PiecewisePoly h = rbm_walk_profile(k.y, k.t, r.x(j), k.n);
    for (Eigen::Index i = 0; i < nu; ++i) {
      k.psi(i, j) = r.w(j) * rbm_basis(BasisKind::Phi, k.n, k.t, u.x(i) - r.x(j));
      k.phi(j, i) = h(u.x(i));
    }
  }
}

}  // namespace

KernelAssembly assemble_kernel(Model model, const InitialData& y, double t, double a, int n,
                               const Discretization& disc) {
  if (n < 1) throw std::invalid_argument("kernel needs n >= 1");
  if (n > y.size()) throw std::invalid_argument("initial data shorter than n");
  if (!(t >= 0)) throw std::invalid_argument("t must be nonnegative");
  if (is_discrete_time(model)) as_lattice(t, "t");
  KernelAssembly k;
  k.model = model;
  k.y = y;
  k.t = t;
  k.a = a;
  k.n = n;
  k.disc = disc;
  if (model == Model::RBM)
    assemble_rbm(k);
  else
    assemble_lattice(k);
  if (!k.empty()) {
    k.matrix = k.psi * k.phi;
    k.matrix *= k.weights.asDiagonal();
    if (!k.matrix.allFinite()) throw std::runtime_error("kernel matrix is not finite");
  }
  return k;
}

DetResult<double> det_fredholm(const KernelAssembly& k) {
  if (k.empty()) return {};
  return fredholm_det(k.matrix);
}

double resolvent_inner(const KernelAssembly& k, const Eigen::VectorXd& f,
                       const Eigen::VectorXd& g) {
  if (k.empty()) return 0.0;
  return resolvent_inner(k.matrix, k.weights, f, g);
}

Eigen::VectorXd psi_on_nodes(const KernelAssembly& k, double r, int m) {
  if (k.empty()) return {};
  if (k.model != Model::RBM) return lattice_psi(k, as_lattice(r, "r"), m);
  Eigen::VectorXd out(k.nodes.size());
  double c = std::exp(k.a - r);
  for (Eigen::Index i = 0; i < k.nodes.size(); ++i)
    out(i) = c * rbm_basis(BasisKind::Phi, m, k.t, k.nodes(i) - r);
  return out;
}

Eigen::VectorXd phi_on_nodes(const KernelAssembly& k, double r, int m) {
  if (k.empty()) return {};
  if (m < 1) return Eigen::VectorXd::Zero(k.nodes.size());
  if (k.model != Model::RBM) {
    LatticePhi phi(k, m);
    return phi(as_lattice(r, "r"));
  }
  PiecewisePoly h = rbm_walk_profile(k.y, k.t, r, m);
  Eigen::VectorXd out(k.nodes.size());
  double c = std::exp(r - k.a);
  for (Eigen::Index i = 0; i < k.nodes.size(); ++i) out(i) = c * h(k.nodes(i));
  return out;
}

double scaled_resolvent_inner(const KernelAssembly& k, double F, const Eigen::VectorXd& f,
                              const Eigen::VectorXd& g) {
  if (k.empty()) return F * (k.weights.array() * f.array() * g.array()).sum();
  if (std::abs(F) > 1e-6) return F * resolvent_inner(k, f, g);
  Eigen::MatrixXd m = k.matrix + f * (g.array() * k.weights.array()).matrix().transpose();
  return F - fredholm_det(m).value;
}

Partials analytic_partials(Model model, const InitialData& y, double t, double a, int n,
                           const Discretization& disc) {
  Partials p;
  p.has_dt = model == Model::TASEP || model == Model::PushTASEP || model == Model::RBM;
  p.has_da = model == Model::RBM;
  if (n <= 0) return p;
  KernelAssembly k = assemble_kernel(model, y, t, a, n, disc);
  DetResult<double> d = det_fredholm(k);
  p.F = d.value;
  p.near_singular = d.near_singular;
  if (k.empty()) return p;
  switch (model) {
    case Model::TASEP:
      p.dF_dt = 0.5 * scaled_resolvent_inner(k, p.F, psi_on_nodes(k, a, n), phi_on_nodes(k, a + 1, n));
      break;
    case Model::PushTASEP:
      p.dF_dt = -2.0 * scaled_resolvent_inner(k, p.F, psi_on_nodes(k, a + 1, n), phi_on_nodes(k, a, n));
      break;
    case Model::RBM: {
      Eigen::VectorXd psi_n = psi_on_nodes(k, a, n), psi_up = psi_on_nodes(k, a, n + 1);
      Eigen::VectorXd phi_n = phi_on_nodes(k, a, n), phi_dn = phi_on_nodes(k, a, n - 1);
      double up = scaled_resolvent_inner(k, p.F, psi_up, phi_n);
      double dn = scaled_resolvent_inner(k, p.F, psi_n, phi_dn);
      p.dF_dt = -0.5 * (up + dn);
      p.dF_da = -scaled_resolvent_inner(k, p.F, psi_n, phi_n);
      p.d2F_da2 = -(up - dn);
      break;
    }
    default:
      break;
  }
  return p;
}

double F_value(Model model, const InitialData& y, double t, double a, int n,
               const Discretization& disc) {
  if (n <= 0) return 1.0;
  return det_fredholm(assemble_kernel(model, y, t, a, n, disc)).value;
}

bool in_validity_region(Model model, const InitialData& y, double t, double a, int n) {
  if (n < 1) return true;
  if (model == Model::Parallel) return t >= 1 && a < y.at(n) + t;
  return true;
}

GridField F_field(Model model, const InitialData& y, const Axis& t_axis, const Axis& a_axis,
                  int n_lo, int n_hi, const Discretization& disc, bool partials, int threads) {
  if (n_hi < n_lo) throw std::invalid_argument("empty level range");
  GridField f(t_axis, a_axis, Axis::discrete(n_lo, n_hi - n_lo + 1));
  const bool dt = partials && (model == Model::TASEP || model == Model::PushTASEP || model == Model::RBM);
  const bool da = partials && model == Model::RBM;
  if (dt) f.enable(Channel::Dt);
  if (da) {
    f.enable(Channel::Da);
    f.enable(Channel::Daa);
  }
  std::vector<Index3> points;
  f.for_each([&](Index3 p) { points.push_back(p); });
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < points.size(); i += stride) {
      Index3 p = points[i];
      auto c = f.coords(p);
      int n = static_cast<int>(c[2]);
      try {
        if (partials) {
          Partials q = analytic_partials(model, y, c[0], c[1], n, disc);
          f(p) = q.F;
          if (dt) f.set(Channel::Dt, p, q.dF_dt);
          if (da) {
            f.set(Channel::Da, p, q.dF_da);
            f.set(Channel::Daa, p, q.d2F_da2);
          }
        } else {
          f(p) = F_value(model, y, c[0], c[1], n, disc);
        }
        if (!std::isfinite(f(p))) throw std::runtime_error("non-finite determinant");
      } catch (const std::exception&) {
        f(p) = 0.0;
        f.set_valid(p, false);
      }
    }
  };
  unsigned hw = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  hw = std::max(1u, std::min<unsigned>(hw, static_cast<unsigned>(points.size())));
  if (hw == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < hw; ++w) pool.emplace_back(work, w, hw);
    for (auto& th : pool) th.join();
  }
  return f;
}

}  // namespace kpz

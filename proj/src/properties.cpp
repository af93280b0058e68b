#include "kpzlab/properties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kpzlab/linalg.hpp"
#include "kpzlab/mc_models.hpp"
#include "kpzlab/specfun.hpp"

namespace kpz {

namespace {

std::mt19937_64 keyed(std::uint64_t seed, std::initializer_list<long> keys) {
  std::vector<std::uint32_t> s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (long k : keys) s.push_back(static_cast<std::uint32_t>(k + (1L << 20)));
  std::seed_seq seq(s.begin(), s.end());
  return std::mt19937_64(seq);
}

double fact(int k) { return std::tgamma(k + 1.0); }

struct Wave {
  double c, k, w, phase;
};

// 2 + sum c sin(k a + w t + phase), with sum |c| < 1, as a jet at (0, 0).
Jet wave_jet(const std::vector<Wave>& waves) {
  Jet j;
  j.c[0][0] = 2.0;
  for (const Wave& s : waves)
    for (int i = 0; i <= Jet::D; ++i)
      for (int l = 0; i + l <= Jet::D; ++l)
        j.c[i][l] += s.c * std::pow(s.w, i) * std::pow(s.k, l) / (fact(i) * fact(l)) *
                     std::sin(s.phase + (i + l) * std::numbers::pi / 2);
  return j;
}

std::vector<Wave> random_waves(std::mt19937_64& rng, bool smooth_in_a) {
  std::uniform_real_distribution<double> uc(0.05, 0.3), uk(-1.5, 1.5), uph(0, 2 * std::numbers::pi);
  std::vector<Wave> w(3);
  for (auto& s : w) s = {uc(rng), smooth_in_a ? uk(rng) : 0.0, uk(rng), uph(rng)};
  return w;
}

struct Tracker {
  PropertyResult r;
  Tracker(std::string name, double tol) {
    r.name = std::move(name);
    r.tolerance = tol;
  }
  void add(double err) {
    ++r.instances;
    if (!(err <= r.max_error)) r.max_error = std::isnan(err) ? INFINITY : err;
  }
  void rel(double x, double y) { add(std::abs(x - y) / std::max(1.0, std::max(std::abs(x), std::abs(y)))); }
  PropertyResult done() {
    r.pass = r.instances > 0 && r.max_error <= r.tolerance;
    return r;
  }
};

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale) {
  std::normal_distribution<double> nd(0, 1);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * nd(rng);
  return m;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Kernel K on m nodes with weights w; returns M = K diag(w).
Eigen::MatrixXd weighted(const Eigen::MatrixXd& K, const Eigen::VectorXd& w) { return K * w.asDiagonal(); }

}  // namespace

JetField random_jet_field(EquationId eq, std::uint64_t seed) {
  switch (eq) {
    case EquationId::RBM:
      return [seed](Index3 x) {
        auto rng = keyed(seed, {0, 0, x.n});
        return wave_jet(random_waves(rng, true));
      };
    case EquationId::TASEP:
      return [seed](Index3 x) {
        auto rng = keyed(seed, {0, x.a, x.n});
        return wave_jet(random_waves(rng, false));
      };
    case EquationId::Parallel:
      return [seed](Index3 x) {
        auto rng = keyed(seed, {x.t, x.a, x.n});
        return Jet::constant(std::uniform_real_distribution<double>(0.5, 1.5)(rng));
      };
    default:
      throw std::invalid_argument("random jet fields exist for RBM, TASEP and Parallel only");
  }
}

PropertyResult check_zc_identity(EquationId eq, int instances, std::uint64_t seed, double tol) {
  Tracker tr(std::string("zero curvature ") + make_equation(eq, 0.5).name, tol);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> up(0.1, 0.9), uc(0.5, 2.0);
  for (int i = 0; i < instances; ++i) {
    JetField F = random_jet_field(eq, rng());
    double p = up(rng), c = uc(rng);
    ZcEntry e = zc_entry(eq, F, p, c);
    double scale = std::max(1.0, std::abs(e.commutator));
    tr.add(std::max(std::abs(e.commutator - e.prefactor * e.dK) / scale, e.other / scale));
  }
  return tr.done();
}

PropertyResult check_cyclicity(int instances, std::uint64_t seed, double tol) {
  Tracker tr("cyclicity and transpose", tol);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> um(3, 12);
  for (int i = 0; i < instances; ++i) {
    int m = um(rng), k = um(rng);
    Eigen::MatrixXd A = random_matrix(rng, m, k, 0.5 / std::sqrt(double(m + k)));
    Eigen::MatrixXd B = random_matrix(rng, k, m, 0.5 / std::sqrt(double(m + k)));
    Eigen::MatrixXd AB = A * B, BA = B * A;
    double d1 = fredholm_det(AB).value, d2 = fredholm_det(BA).value;
    double d3 = fredholm_det(Eigen::MatrixXd(AB.transpose())).value;
    tr.rel(d1, d2);
    tr.rel(d1, d3);
  }
  return tr.done();
}

PropertyResult check_parameter_differentiation(int instances, std::uint64_t seed, double tol) {
  Tracker tr("parameter differentiation", tol);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> um(3, 12);
  std::uniform_real_distribution<double> uz(-1, 1);
  for (int i = 0; i < instances; ++i) {
    int m = um(rng);
    double s = 0.4 / std::sqrt(double(m));
    Eigen::MatrixXd K0 = random_matrix(rng, m, m, s), K1 = random_matrix(rng, m, m, s),
                    K2 = random_matrix(rng, m, m, s);
    Eigen::VectorXd w = random_vector(rng, m, 0.5, 1.5);
    auto Kz = [&](double z) { return Eigen::MatrixXd(K0 + std::sin(z) * K1 + z * z * K2); };
    auto dKz = [&](double z) { return Eigen::MatrixXd(std::cos(z) * K1 + 2 * z * K2); };
    double z = uz(rng), h = 1e-5;
    Eigen::MatrixXd M = weighted(Kz(z), w), dM = weighted(dKz(z), w);
    Eigen::MatrixXd R = (Eigen::MatrixXd::Identity(m, m) - M).inverse();
    double F = fredholm_det(M).value;
    double analytic = -F * (R * dM).trace();
    double fd = (fredholm_det(weighted(Kz(z + h), w)).value - fredholm_det(weighted(Kz(z - h), w)).value) / (2 * h);
    tr.rel(analytic, fd);

    // d(I-M)^{-1} = R dM R
    Eigen::MatrixXd Rp = (Eigen::MatrixXd::Identity(m, m) - weighted(Kz(z + h), w)).inverse();
    Eigen::MatrixXd Rm = (Eigen::MatrixXd::Identity(m, m) - weighted(Kz(z - h), w)).inverse();
    Eigen::MatrixXd dR = (Rp - Rm) / (2 * h);
    tr.add((dR - R * dM * R).cwiseAbs().maxCoeff() / std::max(1.0, dR.cwiseAbs().maxCoeff()));
  }
  return tr.done();
}

PropertyResult check_rank_one_perturbation(int instances, std::uint64_t seed, double tol) {
  Tracker tr("rank-one perturbation", tol);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> um(3, 12);
  for (int i = 0; i < instances; ++i) {
    int m = um(rng);
    Eigen::MatrixXd KB = random_matrix(rng, m, m, 0.4 / std::sqrt(double(m)));
    Eigen::VectorXd w = random_vector(rng, m, 0.5, 1.5);
    Eigen::VectorXd psi = random_vector(rng, m, -0.5, 0.5), phi = random_vector(rng, m, -0.5, 0.5);
    Eigen::MatrixXd KA = KB + psi * phi.transpose();
    Eigen::MatrixXd MA = weighted(KA, w), MB = weighted(KB, w);
    double FA = fredholm_det(MA).value, FB = fredholm_det(MB).value;
    tr.rel(FA / FB, 1 - resolvent_inner(MB, w, psi, phi));
    tr.rel(FB / FA, 1 + resolvent_inner(MA, w, psi, phi));
  }
  return tr.done();
}

PropertyResult check_rank_one_resolvent(int instances, std::uint64_t seed, double tol) {
  Tracker tr("rank-one resolvent identity", tol);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> um(3, 12);
  for (int i = 0; i < instances; ++i) {
    int m = um(rng);
    Eigen::MatrixXd KB = random_matrix(rng, m, m, 0.4 / std::sqrt(double(m)));
    Eigen::VectorXd w = random_vector(rng, m, 0.5, 1.5);
    Eigen::VectorXd psi = random_vector(rng, m, -0.5, 0.5), phi = random_vector(rng, m, -0.5, 0.5);
    Eigen::VectorXd f = random_vector(rng, m, -1, 1), g = random_vector(rng, m, -1, 1);
    Eigen::MatrixXd MA = weighted(Eigen::MatrixXd(KB + psi * phi.transpose()), w), MB = weighted(KB, w);
    double FA = fredholm_det(MA).value, FB = fredholm_det(MB).value;
    double lhs = resolvent_inner(MA, w, f, g);
    double rhs = resolvent_inner(MB, w, f, g) +
                 FB / FA * resolvent_inner(MB, w, psi, g) * resolvent_inner(MB, w, f, phi);
    tr.rel(lhs, rhs);
  }
  return tr.done();
}

PropertyResult check_flow_identities(int instances, std::uint64_t seed, double tol) {
  Tracker tr("basis flow identities", tol);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ua(-4, 4), un(2, 5), ut(1, 6);
  std::uniform_real_distribution<double> ur(0.2, 2.5), up(0.15, 0.85), urt(0.5, 2.0), ux(-2, 2);
  auto ph = [](Model m, double t, long a, int n, long x, double p = 0.5) {
    return model_basis(m, BasisKind::Phi, t, a, n, x, p);
  };
  auto pb = [](Model m, double t, long a, int n, long x, double p = 0.5) {
    return model_basis(m, BasisKind::Phibar, t, a, n, x, p);
  };
  // eighth-order central first derivative
  static constexpr double w8[] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  auto d8 = [](auto&& f, double x, double h) {
    auto once = [&](double hh) {
      double s = 0;
      for (int k = 1; k <= 4; ++k) s += w8[k - 1] * (f(x + k * hh) - f(x - k * hh));
      return s / hh;
    };
    // one Richardson step removes the h^8 term
    return (256 * once(h / 2) - once(h)) / 255;
  };

  for (int trial = 0; trial < instances; ++trial) {
    long a = ua(rng), x = ua(rng);
    int n = un(rng);
    double t = ur(rng);

    for (Model m : {Model::TASEP, Model::PushTASEP}) {
      tr.rel(ph(m, t, a, n + 1, x) - ph(m, t, a, n, x), 2 * (ph(m, t, a + 1, n, x) - ph(m, t, a, n, x)));
      tr.rel(pb(m, t, a, n, x) - pb(m, t, a, n - 1, x), 2 * (pb(m, t, a, n, x) - pb(m, t, a - 1, n, x)));
    }
    tr.rel(model_basis_dt(Model::TASEP, BasisKind::Phi, t, a, n, x),
           -0.5 * (ph(Model::TASEP, t, a, n, x) - ph(Model::TASEP, t, a - 1, n, x)));
    tr.rel(model_basis_dt(Model::TASEP, BasisKind::Phibar, t, a, n, x),
           -0.5 * (pb(Model::TASEP, t, a + 1, n, x) - pb(Model::TASEP, t, a, n, x)));
    tr.rel(model_basis_dt(Model::PushTASEP, BasisKind::Phi, t, a, n, x),
           2 * (ph(Model::PushTASEP, t, a + 1, n, x) - ph(Model::PushTASEP, t, a, n, x)));
    tr.rel(model_basis_dt(Model::PushTASEP, BasisKind::Phibar, t, a, n, x),
           2 * (pb(Model::PushTASEP, t, a, n, x) - pb(Model::PushTASEP, t, a - 1, n, x)));

    long T = ut(rng);
    double p = up(rng), q = 1 - p;
    double beta = -p / (2 * (q + p / 2));
    Model P = Model::Parallel;
    tr.rel(ph(P, T, a, n + 1, x, p) - ph(P, T, a, n, x, p),
           2 * ph(P, T, a + 1, n, x, p) - ph(P, T, a, n, x, p) - ph(P, T - 1, a, n, x, p) / (q + p / 2));
    tr.rel(pb(P, T, a, n, x, p) - pb(P, T, a, n - 1, x, p),
           -(2 * pb(P, T, a - 1, n, x, p) - pb(P, T, a, n, x, p) - pb(P, T + 1, a, n, x, p) / (q + p / 2)));
    tr.rel(ph(P, T + 1, a, n, x, p) - ph(P, T, a, n, x, p), beta * (ph(P, T, a, n, x, p) - ph(P, T, a - 1, n, x, p)));
    tr.rel(pb(P, T, a, n, x, p) - pb(P, T - 1, a, n, x, p), beta * (pb(P, T, a + 1, n, x, p) - pb(P, T, a, n, x, p)));

    Model B = Model::Blocking;
    double gb = -(p / 2) / (q + p / 2);
    tr.rel(ph(B, T, a, n + 1, x, p) - ph(B, T, a, n, x, p), 2 * (ph(B, T, a + 1, n, x, p) - ph(B, T, a, n, x, p)));
    tr.rel(pb(B, T, a, n, x, p) - pb(B, T, a, n - 1, x, p), 2 * (pb(B, T, a, n, x, p) - pb(B, T, a - 1, n, x, p)));
    tr.rel(ph(B, T + 1, a, n, x, p) - ph(B, T, a, n, x, p), gb * (ph(B, T, a, n, x, p) - ph(B, T, a - 1, n, x, p)));
    tr.rel(pb(B, T, a, n, x, p) - pb(B, T - 1, a, n, x, p), gb * (pb(B, T, a + 1, n, x, p) - pb(B, T, a, n, x, p)));

    // for the pushing model the parameter is the jump probability
    Model L = Model::Pushing;
    double jq = p, gl = jq / (jq + (1 - jq) / 2);
    tr.rel(ph(L, T, a, n + 1, x, jq) - ph(L, T, a, n, x, jq), 2 * (ph(L, T, a + 1, n, x, jq) - ph(L, T, a, n, x, jq)));
    tr.rel(pb(L, T, a, n, x, jq) - pb(L, T, a, n - 1, x, jq), 2 * (pb(L, T, a, n, x, jq) - pb(L, T, a - 1, n, x, jq)));
    tr.rel(ph(L, T + 1, a, n, x, jq) - ph(L, T, a, n, x, jq), gl * (ph(L, T, a + 1, n, x, jq) - ph(L, T, a, n, x, jq)));
    tr.rel(pb(L, T, a, n, x, jq) - pb(L, T - 1, a, n, x, jq), gl * (pb(L, T, a, n, x, jq) - pb(L, T, a - 1, n, x, jq)));

    // Brownian basis: d_x phi_n = -phi_{n+1}, d_x phibar_n = phibar_{n-1},
    // d_t phi_n = phi_{n+2}/2, d_t phibar_n = -phibar_{n-2}/2
    double rt = urt(rng), rx = ux(rng), h = 1e-2;
    auto phi = [&](int k, double tt, double xx) { return rbm_basis(BasisKind::Phi, k, tt, xx); };
    auto phib = [&](int k, double tt, double xx) { return rbm_basis(BasisKind::Phibar, k, tt, xx); };
    tr.rel(d8([&](double s) { return phi(n, rt, s); }, rx, h), -phi(n + 1, rt, rx));
    tr.rel(d8([&](double s) { return phib(n, rt, s); }, rx, h), phib(n - 1, rt, rx));
    tr.rel(d8([&](double s) { return phi(n, s, rx); }, rt, h), 0.5 * phi(n + 2, rt, rx));
    tr.rel(d8([&](double s) { return phib(n, s, rx); }, rt, h), -0.5 * phib(n - 2, rt, rx));
  }
  return tr.done();
}

PropertyResult check_odd_annihilation(int instances, std::uint64_t seed, double tol) {
  Tracker tr("odd Hirota derivatives annihilate f.f", tol);
  std::mt19937_64 rng(seed);
  const int N = 13;
  const double h = 0.05;
  static constexpr Orders odd[] = {{1, 0, 0}, {0, 1, 0}, {3, 0, 0}, {0, 3, 0}, {1, 2, 0}, {2, 1, 0}};
  for (int i = 0; i < instances; ++i) {
    GridField f(Axis::continuous(0.3, h, N), Axis::continuous(-0.3, h, N), Axis::discrete(1, 1));
    auto waves = random_waves(rng, true);
    f.for_each([&](Index3 p) {
      auto c = f.coords(p);
      double v = 2.0;
      for (const Wave& s : waves) v += s.c * std::sin(s.k * c[1] + s.w * c[0] + s.phase);
      f(p) = v;
      f.set_valid(p, true);
    });
    Index3 mid{N / 2, N / 2, 0};
    for (const Orders& o : odd) {
      for (Accuracy acc : {Accuracy::Second, Accuracy::Fourth}) {
        double d = hirota_pair(f, mid, f, mid, o, acc);
        double scale = f(mid) * f(mid) / std::pow(h, o[0] + o[1]);
        tr.add(std::abs(d) / scale);
      }
    }
  }
  return tr.done();
}

PropertyResult check_seed_determinism(std::uint64_t seed, long runs, int threads) {
  Tracker tr("seed determinism across thread counts", 0.0);
  for (Model m : {Model::RBM, Model::TASEP, Model::PushTASEP, Model::Parallel, Model::Blocking, Model::Pushing}) {
    ModelConfig cfg;
    cfg.model = m;
    cfg.y = m == Model::RBM ? InitialData::packed(3) : InitialData::step(3);
    cfg.horizon = is_discrete_time(m) ? 6.0 : 1.0;
    cfg.seed = seed;
    auto one = sample_level(cfg, 3, cfg.horizon, runs, 1);
    auto many = sample_level(cfg, 3, cfg.horizon, runs, threads);
    long diff = 0;
    for (std::size_t k = 0; k < one.size(); ++k) diff += one[k] != many[k];
    if (one.size() != many.size()) diff += 1;
    tr.add(double(diff));
  }
  return tr.done();
}

std::vector<PropertyResult> run_property_suite(std::uint64_t seed, int instances) {
  std::vector<PropertyResult> out;
  for (EquationId eq : {EquationId::RBM, EquationId::TASEP, EquationId::Parallel})
    out.push_back(check_zc_identity(eq, instances, seed));
  out.push_back(check_cyclicity(instances, seed + 1));
  out.push_back(check_parameter_differentiation(instances, seed + 2));
  out.push_back(check_rank_one_perturbation(instances, seed + 3));
  out.push_back(check_rank_one_resolvent(instances, seed + 4));
  out.push_back(check_flow_identities(instances, seed + 5));
  out.push_back(check_odd_annihilation(std::max(1, instances / 10), seed + 6));
  out.push_back(check_seed_determinism(seed + 7));
  return out;
}

}  // namespace kpz

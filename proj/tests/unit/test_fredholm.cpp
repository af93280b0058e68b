#include <cmath>
#include <random>

#include "doctest.h"
#include "kpzlab/fredholm.hpp"

using namespace kpz;

namespace {

double poisson_cdf(long k, double t) {
  if (k < 0) return 0.0;
  double term = std::exp(-t), s = 0;
  for (long j = 0; j <= k; ++j) {
    s += term;
    term *= t / (j + 1);
  }
  return s;
}

double binom_cdf(long k, int t, double p) {
  if (k < 0) return 0.0;
  double s = 0;
  for (long j = 0; j <= std::min<long>(k, t); ++j)
    s += std::tgamma(t + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(t - j + 1.0)) *
         std::pow(p, j) * std::pow(1 - p, t - j);
  return s;
}

}  // namespace

TEST_CASE("determinant basics") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 4);
  CHECK(fredholm_det(z).value == 1.0);
  Eigen::VectorXd f(3), g(3);
  f << 0.3, -0.2, 0.5;
  g << 0.1, 0.4, -0.3;
  Eigen::MatrixXd r1 = f * g.transpose();
  CHECK(fredholm_det(r1).value == doctest::Approx(1 - f.dot(g)));
  Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
  double s = f.dot(g);
  CHECK(resolvent_inner(r1, w, f, g) == doctest::Approx(s / (1 - s)));
  CHECK(resolvent_inner(z.topLeftCorner(3, 3), w, f, g) == doctest::Approx(s));
}

TEST_CASE("TASEP one particle is Poisson") {
  InitialData y = InitialData::from({0});
  CHECK(F_value(Model::TASEP, y, 1.0, 0, 1) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-10));
  for (double t : {0.5, 1.0, 2.0})
    for (long a = -3; a <= 8; ++a)
      CHECK(std::abs(F_value(Model::TASEP, y, t, a, 1) - (1 - poisson_cdf(a, t))) < 1e-12);
}

TEST_CASE("one particle laws for the other models") {
  InitialData y = InitialData::from({2});
  for (double t : {0.5, 1.0, 2.0})
    for (long a = -8; a <= 3; ++a)
      CHECK(std::abs(F_value(Model::PushTASEP, y, t, a, 1) - poisson_cdf(2 - a - 1, t)) < 1e-12);
  for (int t : {1, 2, 4})
    for (long a = -2; a <= 7; ++a) {
      double p = 0.35;
      double surv = 1 - binom_cdf(a - 2, t, p);
      Discretization d;
      d.p_or_q = p;
      CHECK(std::abs(F_value(Model::Parallel, y, t, a, 1, d) - surv) < 1e-12);
      CHECK(std::abs(F_value(Model::Blocking, y, t, a, 1, d) - surv) < 1e-12);
    }
  for (int t : {1, 2, 4})
    for (long a = -4; a <= 3; ++a) {
      Discretization d;
      d.p_or_q = 0.35;
      // Y = 2 - Bin(t, q) > a
      CHECK(std::abs(F_value(Model::Pushing, y, t, a, 1, d) - binom_cdf(2 - a - 1, t, 0.35)) < 1e-12);
    }
  for (double t : {0.5, 1.0, 2.0})
    for (double a : {-1.5, -0.4, 0.0, 0.7, 1.9}) {
      double expect = 0.5 * std::erfc(-(0.3 - a) / std::sqrt(2 * t));
      CHECK(std::abs(F_value(Model::RBM, InitialData::from({0.3}), t, a, 1) - expect) < 1e-9);
    }
}

TEST_CASE("initial condition F_0 = 1{y_n > a}") {
  InitialData y = InitialData::from({1, -1, -4});
  for (Model m : {Model::TASEP, Model::PushTASEP, Model::Parallel, Model::Blocking, Model::Pushing})
    for (int n = 1; n <= 3; ++n)
      for (long a = -7; a <= 3; ++a)
        CHECK(std::abs(F_value(m, y, 0, a, n) - (y.at(n) > a ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("TASEP determinants against the exact Markov chain") {
  // values from a matrix exponential over the full configuration space
  InitialData y = InitialData::from({0, -1});
  CHECK(F_value(Model::TASEP, y, 1.0, -1, 2) == doctest::Approx(0.2642411176571153).epsilon(1e-10));
  CHECK(F_value(Model::TASEP, y, 1.0, 0, 2) == doctest::Approx(0.031696959722285804).epsilon(1e-9));
  CHECK(F_value(Model::TASEP, y, 1.0, 1, 2) == doctest::Approx(0.0021557266423751177).epsilon(1e-8));
  InitialData y3 = InitialData::from({1, -1, -2});
  CHECK(F_value(Model::TASEP, y3, 2.0, -2, 3) == doctest::Approx(0.5939941502901609).epsilon(1e-10));
  CHECK(F_value(Model::TASEP, y3, 2.0, -1, 3) == doctest::Approx(0.13304138391412104).epsilon(1e-10));
  CHECK(F_value(Model::TASEP, y3, 2.0, 0, 3) == doctest::Approx(0.013853432904102032).epsilon(1e-9));
  InitialData yg = InitialData::from({0, -2});
  CHECK(F_value(Model::TASEP, yg, 1.5, -1, 2) == doctest::Approx(0.28082245118684607).epsilon(1e-10));
}

TEST_CASE("Push-TASEP determinants against the exact Markov chain") {
  InitialData y = InitialData::from({0, -1});
  CHECK(F_value(Model::PushTASEP, y, 1.0, -3, 2) == doctest::Approx(0.47367349132814374).epsilon(1e-10));
  CHECK(F_value(Model::PushTASEP, y, 1.0, -2, 2) == doctest::Approx(0.13533528323661315).epsilon(1e-10));
  CHECK(F_value(Model::PushTASEP, y, 1.0, -5, 2) == doctest::Approx(0.9313699006075217).epsilon(1e-10));
  InitialData y3 = InitialData::from({2, 0, -1});
  CHECK(F_value(Model::PushTASEP, y3, 1.5, -4, 3) == doctest::Approx(0.47714333480988186).epsilon(1e-10));
  CHECK(F_value(Model::PushTASEP, y3, 1.5, -2, 3) == doctest::Approx(0.027772491345605763).epsilon(1e-9));
  CHECK(std::abs(F_value(Model::PushTASEP, y3, 1.5, -1, 3)) < 1e-12);
}

TEST_CASE("discrete-time determinants against coin enumeration") {
  InitialData y = InitialData::from({0, -2, -3});
  Discretization par, blk, psh;
  par.p_or_q = 0.4;
  blk.p_or_q = 0.6;
  psh.p_or_q = 0.3;
  CHECK(F_value(Model::Parallel, y, 3, -3, 3, par) == doctest::Approx(0.352).epsilon(1e-12));
  CHECK(F_value(Model::Parallel, y, 3, -2, 3, par) == doctest::Approx(0.01024).epsilon(1e-11));
  CHECK(std::abs(F_value(Model::Parallel, y, 3, -1, 3, par)) < 1e-13);
  CHECK(F_value(Model::Blocking, y, 3, -3, 3, blk) == doctest::Approx(0.8208).epsilon(1e-12));
  CHECK(F_value(Model::Blocking, y, 3, -2, 3, blk) == doctest::Approx(0.32285952).epsilon(1e-12));
  CHECK(F_value(Model::Blocking, y, 3, -1, 3, blk) == doctest::Approx(0.030233088).epsilon(1e-11));
  CHECK(F_value(Model::Pushing, y, 3, -6, 3, psh) == doctest::Approx(0.9163).epsilon(1e-12));
  CHECK(F_value(Model::Pushing, y, 3, -5, 3, psh) == doctest::Approx(0.52454647).epsilon(1e-12));
  CHECK(F_value(Model::Pushing, y, 3, -4, 3, psh) == doctest::Approx(0.092236816).epsilon(1e-11));
  // blocking with two packed particles at t = 1: particle 2 moves only behind particle 1
  Discretization half;
  half.p_or_q = 0.5;
  CHECK(F_value(Model::Blocking, InitialData::from({-1, -2}), 1, -2, 2, half) == doctest::Approx(0.25));
}

TEST_CASE("packed RBM level two matches the 2x2 GUE top eigenvalue") {
  InitialData y = InitialData::packed(2);
  const double a[] = {-2.0, -1.0, -0.5, 0.0, 0.5};
  const double ref[] = {0.8465769503402596, 0.4457303524362419, 0.232450362354604,
                        0.09084505690810468, 0.025558103188745553};
  for (int i = 0; i < 5; ++i) CHECK(std::abs(F_value(Model::RBM, y, 1.0, a[i], 2) - ref[i]) < 1e-8);
}

TEST_CASE("rank-one window") {
  // one surviving r term: window (y_1, a+1] with a = y_1 for TASEP n = 1
  InitialData y = InitialData::from({0});
  KernelAssembly k = assemble_kernel(Model::TASEP, y, 0.7, 0, 1);
  CHECK(k.nodes.size() == 1);
  Eigen::VectorXd f = psi_on_nodes(k, 0, 1), g = phi_on_nodes(k, 0, 1);
  CHECK(det_fredholm(k).value == doctest::Approx(1 - f.dot(g)));
}

TEST_CASE("TASEP kernel n-flow: K_n - K_{n-1} = 2 psi_{a+1,n-1} (x) phi_{a,n}") {
  InitialData y = InitialData::from({1, -1, -2, -5});
  const double t = 1.3;
  for (int n = 2; n <= 4; ++n)
    for (long a = -3; a <= 2; ++a) {
      KernelAssembly k = assemble_kernel(Model::TASEP, y, t, a, n);
      if (k.empty()) continue;
      Eigen::MatrixXd kn = Eigen::MatrixXd::Zero(k.nodes.size(), k.nodes.size()), km = kn;
      for (long r = y.lattice(n) + 1 - n; r <= a; ++r) {
        kn += psi_on_nodes(k, r, n) * phi_on_nodes(k, r, n).transpose();
        km += psi_on_nodes(k, r, n - 1) * phi_on_nodes(k, r, n - 1).transpose();
      }
      Eigen::MatrixXd rank1 = 2 * psi_on_nodes(k, a + 1, n - 1) * phi_on_nodes(k, a, n).transpose();
      CHECK((kn - km - rank1).norm() <= 1e-9 * std::max(1.0, rank1.norm()));
      CHECK((kn - k.matrix).norm() <= 1e-12 * std::max(1.0, kn.norm()));
    }
}

TEST_CASE("analytic partials") {
  // RBM one particle: dF/da = -Gaussian density
  Partials p = analytic_partials(Model::RBM, InitialData::from({0.0}), 1.0, 0.0, 1);
  CHECK(p.dF_da == doctest::Approx(-0.398942280401432678).epsilon(1e-9));
  CHECK(p.dF_dt == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  // TASEP one particle: d/dt P(Poisson(t) > a) = P(Poisson(t) = a)
  Partials q = analytic_partials(Model::TASEP, InitialData::from({0}), 1.0, 0, 1);
  CHECK(q.dF_dt == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  Partials q2 = analytic_partials(Model::TASEP, InitialData::from({0}), 1.7, 2, 1);
  CHECK(q2.dF_dt == doctest::Approx(std::exp(-1.7) * 1.7 * 1.7 / 2).epsilon(1e-12));
  // Push-TASEP one particle: d/dt P(2 - N > a) = -P(N = 1 - a)
  Partials q3 = analytic_partials(Model::PushTASEP, InitialData::from({2}), 1.2, 0, 1);
  CHECK(q3.dF_dt == doctest::Approx(-std::exp(-1.2) * 1.2).epsilon(1e-12));
}

TEST_CASE("analytic partials agree with differenced determinants") {
  const double h = 1e-3;
  auto check = [&](Model m, const InitialData& y, double t, double a, int n) {
    Partials p = analytic_partials(m, y, t, a, n);
    double fd = (F_value(m, y, t + h, a, n) - F_value(m, y, t - h, a, n)) / (2 * h);
    CHECK(std::abs(p.dF_dt - fd) < 1e-6);
    if (m == Model::RBM) {
      double fa = (F_value(m, y, t, a + h, n) - F_value(m, y, t, a - h, n)) / (2 * h);
      double faa = (F_value(m, y, t, a + h, n) - 2 * p.F + F_value(m, y, t, a - h, n)) / (h * h);
      CHECK(std::abs(p.dF_da - fa) < 1e-6);
      CHECK(std::abs(p.d2F_da2 - faa) < 1e-4);
    }
  };
  check(Model::TASEP, InitialData::step(3), 1.5, -2, 3);
  check(Model::TASEP, InitialData::from({2, 0, -1}), 0.8, 0, 2);
  check(Model::PushTASEP, InitialData::from({2, 0, -1}), 1.0, -3, 3);
  check(Model::RBM, InitialData::from({0.0, -0.5}), 1.0, -0.7, 2);
  check(Model::RBM, InitialData::packed(3), 0.8, -1.0, 3);
}

TEST_CASE("F_field boundary level, monotonicity and single point") {
  InitialData y = InitialData::step(3);
  GridField f = F_field(Model::TASEP, y, Axis::continuous(1.0, 0.5, 2), Axis::discrete(-6, 10), 0, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 10; ++j) {
      CHECK(f(Index3{i, j, 0}) == 1.0);
      for (int n = 1; n <= 3; ++n)
        if (j > 0) CHECK(f(Index3{i, j, n}) <= f(Index3{i, j - 1, n}) + 1e-13);
    }
  CHECK(f(Index3{1, 4, 2}) == doctest::Approx(F_value(Model::TASEP, y, 1.5, -2, 2)));
}

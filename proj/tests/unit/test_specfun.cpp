#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kpzlab/specfun.hpp"

using namespace kpz;

TEST_CASE("hermite values") {
  CHECK(hermite(0, 0.3) == 1.0);
  CHECK(hermite(2, 0.0) == doctest::Approx(-1.0));
  CHECK(hermite(3, 2.0) == doctest::Approx(2.0));
  CHECK_THROWS(hermite(61, 1.0));
}

TEST_CASE("hermite three-term recurrence on integers is exact") {
  for (int n = 1; n < 20; ++n)
    for (int x = -3; x <= 3; ++x)
      CHECK(hermite(n + 1, x) == x * hermite(n, x) - n * hermite(n - 1, x));
}

TEST_CASE("rbm basis spot values") {
  CHECK(rbm_basis(BasisKind::Phibar, 0, 0.7, -1.2) == 1.0);
  CHECK(rbm_basis(BasisKind::Phibar, -2, 0.7, -1.2) == 0.0);
  CHECK(rbm_basis(BasisKind::Phi, 0, 1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)));
  double h = 1e-5;
  double dphi0 = (rbm_basis(BasisKind::Phi, 0, 1, 1 + h) - rbm_basis(BasisKind::Phi, 0, 1, 1 - h)) / (2 * h);
  double expect = -std::exp(-0.5) / std::sqrt(2 * std::numbers::pi);
  CHECK(dphi0 == doctest::Approx(expect).epsilon(1e-8));
  CHECK(-rbm_basis(BasisKind::Phi, 1, 1, 1) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS(rbm_basis(BasisKind::Phi, 1, 0.0, 1.0));
}

TEST_CASE("hermite raising and heat identities against finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-2, 2), ut(0.4, 2.0);
  const double h = 1e-3;
  auto d5 = [&](auto&& f, double x) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
  };
  for (int trial = 0; trial < 40; ++trial) {
    int n = trial % 6;
    double t = ut(rng), x = ux(rng);
    auto phi = [&](int m, double tt, double xx) { return rbm_basis(BasisKind::Phi, m, tt, xx); };
    auto bar = [&](int m, double tt, double xx) { return rbm_basis(BasisKind::Phibar, m, tt, xx); };
    double dx_phi = d5([&](double s) { return phi(n, t, s); }, x);
    double dt_phi = d5([&](double s) { return phi(n, s, x); }, t);
    double dx_bar = d5([&](double s) { return bar(n, t, s); }, x);
    double dt_bar = d5([&](double s) { return bar(n, s, x); }, t);
    auto tol = [](double ref) { return 1e-8 * std::max(1.0, std::abs(ref)); };
    CHECK(std::abs(dx_phi + phi(n + 1, t, x)) < tol(phi(n + 1, t, x)));
    CHECK(std::abs(dt_phi - 0.5 * phi(n + 2, t, x)) < tol(phi(n + 2, t, x)));
    CHECK(std::abs(dx_bar - bar(n - 1, t, x)) < tol(bar(n - 1, t, x)));
    CHECK(std::abs(dt_bar + 0.5 * bar(n - 2, t, x)) < tol(bar(n - 2, t, x)));
  }
}

TEST_CASE("phibar polynomial matches direct evaluation") {
  for (int n = 0; n < 7; ++n) {
    Eigen::VectorXd c = phibar_poly(n, 1.7);
    double z = 0.83, acc = 0;
    for (int k = c.size() - 1; k >= 0; --k) acc = acc * z + c(k);
    CHECK(acc == doctest::Approx(rbm_basis(BasisKind::Phibar, n, 1.7, z)).epsilon(1e-13));
  }
}

TEST_CASE("series coefficient extraction") {
  GenFunSpec s{Model::TASEP, BasisKind::Phi, 0.0, 0.5, 1, 0, 0};
  CHECK(series_coefficient(s, 1, 2) == doctest::Approx(-1.0));
  CHECK(model_basis(Model::TASEP, BasisKind::Phi, 0.0, 0, 1, 0) == doctest::Approx(-1.0));
  CHECK(series_coefficient(s, -1, 4) == 0.0);
  CHECK_THROWS(series_coefficient(s, 5, 3));

  // Polynomial integrands are exact: (1-w)^n (q+pw)^t against binomial sums.
  GenFunSpec b{Model::Blocking, BasisKind::Phi, 4.0, 0.3, 3, 0, 0};
  for (int k = 0; k <= 7; ++k) {
    double expect = 0;
    for (int i = 0; i <= std::min(k, 3); ++i) {
      int j = k - i;
      if (j > 4) continue;
      double c3 = std::tgamma(4.0) / (std::tgamma(i + 1.0) * std::tgamma(4.0 - i));
      double c4 = std::tgamma(5.0) / (std::tgamma(j + 1.0) * std::tgamma(5.0 - j));
      expect += c3 * (i % 2 ? -1 : 1) * c4 * std::pow(0.3, j) * std::pow(0.7, 4 - j);
    }
    CHECK(series_coefficient(b, k, k + 1) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("series helpers") {
  auto e = series_exp<double>(2.0, 6);
  CHECK(e(3) == doctest::Approx(8.0 / 6));
  Series<double> f = Series<double>::Constant(8, -1.0);
  f(0) = 0;
  // exp(-w/(1-w)) = 1 - w - 0 w^2/2 ... check against direct expansion
  auto g = series_exp_of(f, 8);
  CHECK(g(0) == 1.0);
  CHECK(g(1) == doctest::Approx(-1.0));
  CHECK(g(2) == doctest::Approx(-0.5));
  auto inv = series_binom<double>(-2, -1.0, 5);  // (1-w)^{-2}
  for (int k = 0; k < 5; ++k) CHECK(inv(k) == doctest::Approx(k + 1));
}

TEST_CASE("TASEP psi support") {
  for (long u = -3; u <= 6; ++u)
    for (long a = -3; a <= 3; ++a)
      if (a < u - 2) CHECK(model_basis(Model::TASEP, BasisKind::Phi, 1.3, a, 2, u) == 0.0);
}

TEST_CASE("parallel psi at t=0 reduces to TASEP at n=1") {
  for (long u = -4; u <= 2; ++u)
    CHECK(model_basis(Model::Parallel, BasisKind::Phi, 0, 0, 1, u, 0.35) ==
          doctest::Approx(model_basis(Model::TASEP, BasisKind::Phi, 0, 0, 1, u)));
  // for n > 1 the factor (q+pw)^{1-n} survives; compare to an explicit expansion
  double p = 0.35, q = 1 - p;
  // n = 2, u = a: [w^2] q (1-w)^2 (q+pw)^{-1} = q * (r^2/q - 2(-r/q)... ) with r = p/q
  double r = p / q;
  double inv0 = 1 / q, inv1 = -r / q, inv2 = r * r / q;
  double expect = q * (inv2 - 2 * inv1 + inv0);
  CHECK(model_basis(Model::Parallel, BasisKind::Phi, 0, 0, 2, 0, p) == doctest::Approx(expect));
}

namespace {

double ph(Model m, double t, long a, int n, long x, double pq = 0.5) {
  return model_basis(m, BasisKind::Phi, t, a, n, x, pq);
}
double pb(Model m, double t, long a, int n, long x, double pq = 0.5) {
  return model_basis(m, BasisKind::Phibar, t, a, n, x, pq);
}

}  // namespace

TEST_CASE("flow identities of the lattice kernels") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> ua(-4, 4), un(2, 5), ut(1, 6);
  std::uniform_real_distribution<double> ur(0.2, 2.5), up(0.15, 0.85);
  const double tol = 1e-10;
  auto close = [&](double x, double y) {
    return std::abs(x - y) <= tol * std::max(1.0, std::max(std::abs(x), std::abs(y)));
  };
  for (int trial = 0; trial < 100; ++trial) {
    long a = ua(rng), x = ua(rng);
    int n = un(rng);
    double t = ur(rng);

    // TASEP: n flows and exact t derivatives
    CHECK(close(ph(Model::TASEP, t, a, n + 1, x) - ph(Model::TASEP, t, a, n, x),
                2 * (ph(Model::TASEP, t, a + 1, n, x) - ph(Model::TASEP, t, a, n, x))));
    CHECK(close(pb(Model::TASEP, t, a, n, x) - pb(Model::TASEP, t, a, n - 1, x),
                2 * (pb(Model::TASEP, t, a, n, x) - pb(Model::TASEP, t, a - 1, n, x))));
    CHECK(close(model_basis_dt(Model::TASEP, BasisKind::Phi, t, a, n, x),
                -0.5 * (ph(Model::TASEP, t, a, n, x) - ph(Model::TASEP, t, a - 1, n, x))));
    CHECK(close(model_basis_dt(Model::TASEP, BasisKind::Phibar, t, a, n, x),
                -0.5 * (pb(Model::TASEP, t, a + 1, n, x) - pb(Model::TASEP, t, a, n, x))));

    // Push-TASEP
    CHECK(close(ph(Model::PushTASEP, t, a, n + 1, x) - ph(Model::PushTASEP, t, a, n, x),
                2 * (ph(Model::PushTASEP, t, a + 1, n, x) - ph(Model::PushTASEP, t, a, n, x))));
    CHECK(close(pb(Model::PushTASEP, t, a, n, x) - pb(Model::PushTASEP, t, a, n - 1, x),
                2 * (pb(Model::PushTASEP, t, a, n, x) - pb(Model::PushTASEP, t, a - 1, n, x))));
    CHECK(close(model_basis_dt(Model::PushTASEP, BasisKind::Phi, t, a, n, x),
                2 * (ph(Model::PushTASEP, t, a + 1, n, x) - ph(Model::PushTASEP, t, a, n, x))));
    CHECK(close(model_basis_dt(Model::PushTASEP, BasisKind::Phibar, t, a, n, x),
                2 * (pb(Model::PushTASEP, t, a, n, x) - pb(Model::PushTASEP, t, a - 1, n, x))));

    // discrete time
    long T = ut(rng);
    double p = up(rng), q = 1 - p;
    double beta = -p / (2 * (q + p / 2));
    Model P = Model::Parallel;
    CHECK(close(ph(P, T, a, n + 1, x, p) - ph(P, T, a, n, x, p),
                2 * ph(P, T, a + 1, n, x, p) - ph(P, T, a, n, x, p) -
                    ph(P, T - 1, a, n, x, p) / (q + p / 2)));
    CHECK(close(pb(P, T, a, n, x, p) - pb(P, T, a, n - 1, x, p),
                -(2 * pb(P, T, a - 1, n, x, p) - pb(P, T, a, n, x, p) -
                  pb(P, T + 1, a, n, x, p) / (q + p / 2))));
    CHECK(close(ph(P, T + 1, a, n, x, p) - ph(P, T, a, n, x, p),
                beta * (ph(P, T, a, n, x, p) - ph(P, T, a - 1, n, x, p))));
    CHECK(close(pb(P, T, a, n, x, p) - pb(P, T - 1, a, n, x, p),
                beta * (pb(P, T, a + 1, n, x, p) - pb(P, T, a, n, x, p))));

    Model B = Model::Blocking;
    double gb = -(p / 2) / (q + p / 2);
    CHECK(close(ph(B, T, a, n + 1, x, p) - ph(B, T, a, n, x, p),
                2 * (ph(B, T, a + 1, n, x, p) - ph(B, T, a, n, x, p))));
    CHECK(close(pb(B, T, a, n, x, p) - pb(B, T, a, n - 1, x, p),
                2 * (pb(B, T, a, n, x, p) - pb(B, T, a - 1, n, x, p))));
    CHECK(close(ph(B, T + 1, a, n, x, p) - ph(B, T, a, n, x, p),
                gb * (ph(B, T, a, n, x, p) - ph(B, T, a - 1, n, x, p))));
    CHECK(close(pb(B, T, a, n, x, p) - pb(B, T - 1, a, n, x, p),
                gb * (pb(B, T, a + 1, n, x, p) - pb(B, T, a, n, x, p))));

    Model L = Model::Pushing;
    double jq = p, jp = 1 - jq;  // q is the jump probability here
    double gl = jq / (jq + jp / 2);
    CHECK(close(ph(L, T, a, n + 1, x, jq) - ph(L, T, a, n, x, jq),
                2 * (ph(L, T, a + 1, n, x, jq) - ph(L, T, a, n, x, jq))));
    CHECK(close(pb(L, T, a, n, x, jq) - pb(L, T, a, n - 1, x, jq),
                2 * (pb(L, T, a, n, x, jq) - pb(L, T, a - 1, n, x, jq))));
    CHECK(close(ph(L, T + 1, a, n, x, jq) - ph(L, T, a, n, x, jq),
                gl * (ph(L, T, a + 1, n, x, jq) - ph(L, T, a, n, x, jq))));
    CHECK(close(pb(L, T, a, n, x, jq) - pb(L, T - 1, a, n, x, jq),
                gl * (pb(L, T, a, n, x, jq) - pb(L, T, a - 1, n, x, jq))));
  }
}

TEST_CASE("flow identity spot checks") {
  double lhs = ph(Model::TASEP, 1, 0, 3, 0) - ph(Model::TASEP, 1, 0, 2, 0);
  double rhs = 2 * (ph(Model::TASEP, 1, 1, 2, 0) - ph(Model::TASEP, 1, 0, 2, 0));
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

#include <cmath>

#include "doctest.h"
#include "kpzlab/specfun.hpp"
#include "kpzlab/walkfun.hpp"

using namespace kpz;

TEST_CASE("discrete walk factor: immediate absorption and empty indicator") {
  InitialData y = InitialData::from({0, -2, -5});
  for (long v = 1; v <= 4; ++v)
    CHECK(phi_epi_discrete(Model::TASEP, y, 1.2, 0, 3, v) ==
          doctest::Approx(model_basis(Model::TASEP, BasisKind::Phibar, 1.2, 0, 3, v)));
  for (long v = -4; v <= 0; ++v) CHECK(phi_epi_discrete(Model::TASEP, y, 1.2, 0, 1, v) == 0.0);
}

TEST_CASE("discrete walk factor matches path enumeration") {
  // y = (0,-5), n = 2, v = 0, t = 0, a = 0: sum over first steps of length k <= 4.
  InitialData y = InitialData::from({0, -5});
  CHECK(phi_epi_discrete(Model::TASEP, y, 0.0, 0, 2, 0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("discrete walk factor support") {
  InitialData y = InitialData::from({3, 1, -2, -3});
  for (Model m : {Model::TASEP, Model::Parallel, Model::Blocking, Model::PushTASEP})
    for (int n = 1; n <= 4; ++n)
      for (long v = y.lattice(n) - 3; v <= y.lattice(n); ++v)
        CHECK(phi_epi_discrete(m, y, 1.0, 0, n, v, 0.4) == 0.0);
}

TEST_CASE("parallel walk weights") {
  CHECK(walk_step_weight(Model::Parallel, 1, 0.3) == 0.5);
  CHECK(walk_step_weight(Model::Parallel, 3, 0.3) == doctest::Approx(0.125 / 0.7));
  CHECK(walk_step_weight(Model::TASEP, 3, 0.3) == 0.125);
  CHECK(walk_step_weight(Model::TASEP, 0, 0.3) == 0.0);
}

TEST_CASE("absorption law by brute force over step sequences") {
  InitialData y = InitialData::from({0, -1, -3});
  // start at v = -1 <= y_1; first step k lands at -1-k, absorbed at tau=1 when > -1 (never),
  // at tau=2 when the position exceeds y_3 = -3.
  auto law = absorption_law(Model::TASEP, y, 3, -1);
  double mass = 0;
  for (auto& ab : law) {
    CHECK(ab.step == 2);
    mass += ab.weight;
  }
  // paths -1 -> -2 -> ... : after 2 steps position must be > -3, impossible (min drop 2)
  CHECK(mass == 0.0);
  auto law2 = absorption_law(Model::TASEP, InitialData::from({0, -3, -6}), 3, -1);
  double m2 = 0;
  for (auto& ab : law2) m2 += ab.weight;
  // tau = 1 if first step lands in {-2}: prob 1/2; tau = 2 needs B_2 > -6
  double expect = 0.5;  // k = 1
  // k = 2 -> -3 (not absorbed at step 1), then step j with -3-j > -6: j = 1,2
  expect += 0.25 * (0.5 + 0.25);
  // k = 3 -> -4: next in {-5}: 1/2
  expect += 0.125 * 0.5;
  CHECK(m2 == doctest::Approx(expect));
}

TEST_CASE("continuous walk factor") {
  InitialData y = InitialData::from({0.0, -1.0});
  // v >= y_1: absorbed immediately
  CHECK(phi_epi_continuous(y, 1.0, 0.3, 2, 0.5) ==
        doctest::Approx(std::exp(0.3 - 0.5) * rbm_basis(BasisKind::Phibar, 1, 1.0, 0.2)));
  CHECK(phi_epi_continuous(y, 1.0, 0.3, 1, -0.5) == 0.0);
  // Monte Carlo oracle (1e7 Exp(1) paths): 0.8243645 with standard error 3.3e-4
  double v = phi_epi_continuous(y, 1.0, 0.0, 2, -0.5);
  CHECK(std::abs(v - 0.8243645) < 3 * 3.3e-4);
  CHECK_THROWS(phi_epi_continuous(InitialData::packed(7), 1.0, 0.0, 7, 0.0));
}

TEST_CASE("continuous walk profile against nested quadrature") {
  // three levels with distinct breakpoints; nested midpoint sums of the Exp(1) recursion
  InitialData y = InitialData::from({0.5, -0.2, -1.0});
  const double t = 0.8, a = 0.1, v = 0.2;
  auto bar = [&](int m, double x) { return rbm_basis(BasisKind::Phibar, m, t, x - a); };
  // tau = 1 absorbed at b1 in [y2, v): density e^{-(v-b1)}, weight e^{a-b1} bar_{1}
  // tau = 2 absorbed at b2 in [y3, b1) from b1 < y2
  const int N = 4000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    double b1 = y.at(2) + (v - y.at(2)) * (i + 0.5) / N;
    s1 += std::exp(-(v - b1)) * std::exp(a - b1) * bar(1, b1) * (v - y.at(2)) / N;
  }
  for (int i = 0; i < N; ++i) {
    double b1 = y.at(3) + (y.at(2) - y.at(3)) * (i + 0.5) / N;
    double w1 = std::exp(-(v - b1)) * (y.at(2) - y.at(3)) / N;
    for (int j = 0; j < 400; ++j) {
      double b2 = y.at(3) + (b1 - y.at(3)) * (j + 0.5) / 400;
      s2 += w1 * std::exp(-(b1 - b2)) * std::exp(a - b2) * bar(0, b2) * (b1 - y.at(3)) / 400;
    }
  }
  CHECK(phi_epi_continuous(y, t, a, 3, v) == doctest::Approx(s1 + s2).epsilon(1e-5));
}

#include "doctest.h"

#include <cmath>
#include <random>

#include "kpzlab/hierarchy.hpp"
#include "kpzlab/scaling.hpp"

using namespace kpz;

namespace {

double gauss_bump(double T, double X, double A) { return std::exp(-(T * T + X * X + A * A) / 2) + 2; }
double level_bump(double T, double A, double n) { return (1 + 0.3 * n) * std::exp(-(T * T + A * A) / 2) + 2; }

SmoothField generic_field(ScalingMap m) {
  return map_info(m).target == EquationId::KP ? SmoothField(gauss_bump) : SmoothField(level_bump);
}

}  // namespace

TEST_CASE("map evaluation") {
  auto x = map_point(ScalingMap::RbmToKp, 0, 0, 0, 0.3);
  CHECK(x[2] == 0.0);
  auto y = map_point(ScalingMap::TasepToRbm, 1, 1, 4, 0.1);
  CHECK(y[1] == 0.0);
  CHECK(y[0] == doctest::Approx(0.01));
  CHECK(y[2] == 4.0);
  auto z = map_point(ScalingMap::TasepToKp, 0, -2, 0, 0.25);
  CHECK(z[1] == 0.0);
  CHECK(source_parameter(ScalingMap::ParallelToToda, 0.1) == doctest::Approx(0.96));
  CHECK(source_parameter(ScalingMap::ParallelToTasep, 0.1) == 0.1);
  CHECK_THROWS_AS(map_point(ScalingMap::RbmToKp, 0, 0, 0, 0.0), std::invalid_argument);
  for (ScalingMap m : all_scaling_maps()) CHECK(parse_scaling_map(scaling_map_name(m)) == m);
  CHECK_THROWS_AS(parse_scaling_map("kp-rbm"), std::invalid_argument);
}

TEST_CASE("pullback of a constant field is constant") {
  SmoothField one = [](double, double, double) { return 1.0; };
  GridField G = pullback(ScalingMap::RbmToKp, one, Axis::continuous(0, 0.1, 4), Axis::continuous(-1, 0.1, 5),
                         Axis::discrete(1, 3), 0.01);
  G.for_each([&](Index3 p) { CHECK(G(p) == 1.0); });
  CHECK_THROWS_AS(pullback(ScalingMap::RbmToKp, one, Axis::discrete(0, 4), Axis::continuous(-1, 0.1, 5),
                           Axis::discrete(1, 3), 0.01),
                  std::invalid_argument);
  SmoothField bad = [](double, double, double) { return NAN; };
  CHECK_THROWS_AS(pullback(ScalingMap::ParallelToTasep, bad, Axis::discrete(0, 2), Axis::discrete(0, 2),
                           Axis::discrete(1, 2), 0.1),
                  std::domain_error);
}

TEST_CASE("target residuals against closed forms") {
  // F = e^{-(T^2+X^2+A^2)/2} + 2 at the origin: F = 3, F_XX = F_AA = -1,
  // F_AAAA = 3, so KP = (1/4)(2)(3)(-1) + (1/12)(2)(9 + 3) = 1/2
  CHECK(target_residual(ScalingMap::RbmToKp, gauss_bump, {0, 0, 0}) == doctest::Approx(0.5).epsilon(1e-6));
  // 2D Toda on G = (1 + 0.3 r) e^{-(T^2+X^2)/2} + 2 at the origin:
  // (1/2)(2)(G G_TT) - (1/2)(2)(G G_XX) = 0, and -4 (G_1 G_-1 - G_0^2)
  double g0 = 3.0, g1 = 3.3, gm = 2.7;
  CHECK(target_residual(ScalingMap::ParallelToToda, level_bump, {0, 0, 0}) ==
        doctest::Approx(-4 * (g1 * gm - g0 * g0)).epsilon(1e-6));
}

TEST_CASE("residual rates match the leading order of every map") {
  for (ScalingMap m : all_scaling_maps()) {
    RateReport r = scaling_rate(m, generic_field(m), default_scaling_eps());
    INFO(scaling_map_name(m) << " exponent " << r.exponent << " last ratio " << r.rows.back().ratio);
    CHECK(std::abs(r.exponent - r.expected_order) <= 0.1);
    CHECK(std::abs(r.rows.back().ratio - 1) <= 0.05);
    CHECK_FALSE(r.target_vanishes);
    CHECK_FALSE(r.faster_than_leading);
  }
}

TEST_CASE("RBM to KP on the Gaussian bump") {
  RateReport r = scaling_rate(ScalingMap::RbmToKp, gauss_bump, reciprocal_eps({10, 40, 160, 640, 2560}));
  CHECK(r.exponent >= 1.9);
  CHECK(r.exponent <= 2.1);
  CHECK(r.coefficient == -0.5);
  CHECK(r.rows.back().ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Parallel to TASEP decays linearly towards the TASEP residual") {
  RateReport r = scaling_rate(ScalingMap::ParallelToTasep, level_bump, default_scaling_eps());
  CHECK(r.expected_order == 1);
  for (const RateRow& row : r.rows) CHECK(row.target_residual == doctest::Approx(r.rows[0].target_residual));
  CHECK(r.rows.back().residual / r.rows.back().eps == doctest::Approx(r.rows.back().target_residual).epsilon(0.05));
}

TEST_CASE("a KP-annihilated exponential decays faster than the leading order") {
  SmoothField ex = [](double, double, double A) { return std::exp(0.7 * A); };
  for (ScalingMap m : {ScalingMap::RbmToKp, ScalingMap::TasepToKp, ScalingMap::ParallelToKp}) {
    RateReport r = scaling_rate(m, ex, default_scaling_eps());
    CHECK(r.target_vanishes);
    CHECK(r.faster_than_leading);
  }
}

TEST_CASE("rate fits validate their inputs") {
  CHECK_THROWS_AS(scaling_rate(ScalingMap::RbmToKp, gauss_bump, reciprocal_eps({10, 20, 40})), std::invalid_argument);
  CHECK_THROWS_AS(scaling_rate(ScalingMap::RbmToKp, gauss_bump, reciprocal_eps({10, 40, 20, 80})),
                  std::invalid_argument);
}

TEST_CASE("HBDE reindexing of Parallel TASEP") {
  const double p = 0.35;
  GridField one(Axis::discrete(0, 5), Axis::discrete(-3, 7), Axis::discrete(1, 4));
  one.for_each([&](Index3 q) {
    one(q) = 1.0;
    one.set_valid(q, true);
  });
  HbdeReport r1 = hbde_equivalence(one, p);
  CHECK(r1.points > 0);
  CHECK(r1.max_deviation == 0.0);
  CHECK(r1.max_parallel == doctest::Approx(0.0));

  GridField rnd = one;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  rnd.for_each([&](Index3 q) { rnd(q) = u(rng); });
  HbdeReport r2 = hbde_equivalence(rnd, p);
  CHECK(r2.points == r1.points);
  CHECK(r2.max_parallel > 0.1);
  CHECK(r2.max_deviation <= 1e-12);

  // explicit oracle at one interior point
  Index3 q{2, 3, 2};
  double direct = rnd(q + Index3{1, 0, 0}) * rnd(q + Index3{-1, 0, -1}) -
                  p * rnd(q + Index3{0, -1, 0}) * rnd(q + Index3{0, 1, -1}) -
                  (1 - p) * rnd(q) * rnd(q + Index3{0, 0, -1});
  CHECK(std::abs(direct) <= r2.max_hbde + 1e-15);

  HierarchyResult H = recurse_discrete(Model::Parallel, InitialData::step(3), p, Axis::discrete(0, 6),
                                       Axis::discrete(-8, 12), 1, 3);
  HbdeReport r3 = hbde_equivalence(H.F, p);
  CHECK(r3.points > 0);
  CHECK(r3.max_parallel <= 1e-12);
  CHECK(r3.max_hbde <= 1e-12);
  CHECK(r3.max_deviation <= 1e-12);

  CHECK_THROWS_AS(hbde_equivalence(GridField(Axis::continuous(0, 0.1, 3), Axis::discrete(0, 3), Axis::discrete(1, 2)), p),
                  std::invalid_argument);
}

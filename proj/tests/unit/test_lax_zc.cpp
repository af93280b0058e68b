#include "doctest.h"

#include <cmath>
#include <random>

#include "kpzlab/fredholm.hpp"
#include "kpzlab/hierarchy.hpp"
#include "kpzlab/lax_zc.hpp"
#include "kpzlab/properties.hpp"

using namespace kpz;

namespace {

template <class Fn>
GridField sample(Axis t, Axis a, Axis n, Fn fn) {
  GridField f(t, a, n);
  f.for_each([&](Index3 p) {
    auto c = f.coords(p);
    f(p) = fn(c[0], c[1], c[2]);
    f.set_valid(p, true);
  });
  return f;
}

// exp(w t + k a) as a jet at the origin
Jet exp_jet(double w, double k) {
  Jet j;
  for (int i = 0; i <= Jet::D; ++i)
    for (int l = 0; i + l <= Jet::D; ++l) j.c[i][l] = std::pow(w, i) * std::pow(k, l) / (std::tgamma(i + 1.0) * std::tgamma(l + 1.0));
  return j;
}

double max_abs_diff(const Jet& x, const Jet& y) {
  double m = 0;
  for (int i = 0; i <= Jet::D; ++i)
    for (int l = 0; i + l <= Jet::D; ++l) m = std::max(m, std::abs(x.c[i][l] - y.c[i][l]));
  return m;
}

}  // namespace

TEST_CASE("jet arithmetic follows Taylor rules") {
  Jet e1 = exp_jet(0.7, -0.3), e2 = exp_jet(-0.2, 1.1);
  CHECK(max_abs_diff(e1 * e2, exp_jet(0.5, 0.8)) < 1e-14);
  CHECK(max_abs_diff(e1 / e2, exp_jet(0.9, -1.4)) < 1e-14);
  CHECK(max_abs_diff(e1 - e1, Jet{}) == 0.0);
  CHECK(e1.dt().value() == doctest::Approx(0.7));
  CHECK(e1.da().da().value() == doctest::Approx(0.09));
  CHECK(e1.dt().da().value() == doctest::Approx(-0.21));
  CHECK((3.0 * Jet::constant(2.0) + e1).value() == doctest::Approx(7.0));
}

TEST_CASE("derived quantities of simple fields") {
  GridField one = sample(Axis::continuous(0, 0.1, 3), Axis::discrete(-2, 5), Axis::discrete(1, 3),
                         [](double, double, double) { return 1.0; });
  DerivedQuantities d = derived_quantities(one);
  CHECK(d.has_r_a);
  CHECK_FALSE(d.has_u);
  one.for_each([&](Index3 p) {
    if (d.a_n.valid(p)) CHECK(d.a_n(p) == 1.0);
    if (d.r_a.valid(p)) CHECK(d.r_a(p) == 1.0);
  });
  CHECK(d.a_n.valid({1, 2, 0}));
  CHECK_FALSE(d.a_n.valid({1, 2, 2}));  // level 4 is not on the grid

  // F_n = c^n e^{a^2}: a_n = 1 and u_n = 2a on interior levels
  const double c = 1.7, h = 0.05;
  GridField g = sample(Axis::continuous(0, 0.1, 1), Axis::continuous(-0.5, h, 21), Axis::discrete(0, 5),
                       [&](double, double a, double n) { return n == 0 ? 1.0 : std::pow(c, n) * std::exp(a * a); });
  DerivedQuantities dg = derived_quantities(g);
  CHECK(dg.has_u);
  for (int n = 2; n <= 3; ++n)
    for (int j = 1; j < 20; ++j) {
      Index3 p{0, j, n};
      double a = g.coords(p)[1];
      CHECK(dg.a_n(p) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(dg.u(p) == doctest::Approx(2 * a).epsilon(1e-2));
      CHECK(std::abs(dg.grad_u(p)) < 1e-12);
    }
  // the extension F_{-1} = 1 makes a_0 = F_1
  Index3 p0{0, 10, 0};
  CHECK(dg.a_n(p0) == doctest::Approx(g({0, 10, 1})).epsilon(1e-14));
}

TEST_CASE("K fields of constant fields") {
  GridField one = sample(Axis::discrete(0, 4), Axis::discrete(-3, 7), Axis::discrete(1, 3),
                         [](double, double, double) { return 1.0; });
  for (double p : {0.25, 0.6}) {
    KField k = k_field(EquationId::Parallel, one, p);
    CHECK(k.count > 0);
    CHECK(k.expected == doctest::Approx(1 - p));
    CHECK(k.max_dev < 1e-15);
  }
  CHECK(expected_k(EquationId::TASEP, 0.5) == -1.0);
  CHECK(expected_k(EquationId::RBM, 0.5) == 0.0);
  CHECK_THROWS_AS(k_field(EquationId::KP, one), std::invalid_argument);
}

TEST_CASE("TASEP K field is -1 on a Poisson level above a unit level") {
  const double h = 1e-3;
  GridField F(Axis::continuous(1.0 - 3 * h, h, 7), Axis::discrete(-4, 9), Axis::discrete(1, 1));
  F.for_each([&](Index3 p) {
    auto c = F.coords(p);
    double s = 0, term = std::exp(-c[0]);
    for (int j = 0; j <= static_cast<int>(c[1]); ++j, term *= c[0] / j) s += term;
    F(p) = c[1] < 0 ? 1.0 : 1.0 - s;
    F.set_valid(p, true);
  });
  KField k = k_field(EquationId::TASEP, F, 0.5, Accuracy::Fourth);
  CHECK(k.count > 0);
  CHECK(k.max_dev <= 1e-8);
}

TEST_CASE("K fields of determinant fields are constant") {
  GridField T = F_field(Model::TASEP, InitialData::step(4), Axis::continuous(1.0, 0.5, 3), Axis::discrete(-6, 9), 1, 4,
                        {}, true);
  KField kt = k_field(EquationId::TASEP, T);
  CHECK(kt.count > 0);
  CHECK(kt.max_dev <= 1e-6);
  CHECK(kt.max_shift_diff <= 2e-6);

  Discretization d;
  d.p_or_q = 0.4;
  GridField P = F_field(Model::Parallel, InitialData::from({0, -2, -3}), Axis::discrete(1, 5), Axis::discrete(-6, 7),
                        1, 3, d);
  // restrict to the region where the determinant solves the recursion
  GridField Pv = P;
  Pv.for_each([&](Index3 q) {
    auto c = Pv.coords(q);
    if (c[1] + c[2] > 0 || c[0] < 2) Pv.set_valid(q, false);
  });
  KField kp = k_field(EquationId::Parallel, Pv, 0.4);
  CHECK(kp.count > 0);
  CHECK(kp.max_dev <= 1e-9);

  GridField R = F_field(Model::RBM, InitialData::packed(3), Axis::continuous(1.0, 0.5, 2), Axis::continuous(-1.5, 0.5, 5),
                        1, 3, {}, true);
  KField kr = k_field(EquationId::RBM, R);
  CHECK(kr.count > 0);
  CHECK(kr.max_dev <= 1e-5);
}

TEST_CASE("commutator of the constant field vanishes") {
  JetField one = [](Index3) { return Jet::constant(1.0); };
  for (EquationId eq : {EquationId::RBM, EquationId::TASEP, EquationId::Parallel}) {
    auto comm = zc_commutator(eq, one, 0.5, std::sqrt(0.5));
    for (auto [s, v] : comm) CHECK(std::abs(v) < 1e-15);
  }
}

TEST_CASE("commutator equals prefactor times the K difference on random fields") {
  for (EquationId eq : {EquationId::RBM, EquationId::TASEP, EquationId::Parallel}) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 20; ++i) {
      JetField F = random_jet_field(eq, rng());
      ZcEntry e = zc_entry(eq, F, 0.35, 0.8);
      CHECK(std::abs(e.commutator) > 1e-6);  // not a solution
      CHECK(e.commutator == doctest::Approx(e.prefactor * e.dK).epsilon(1e-10));
      CHECK(e.other < 1e-10 * std::max(1.0, std::abs(e.commutator)));
    }
  }
}

TEST_CASE("scalar K values on a hand-built field") {
  // F_n = e^{n t}: D_t F_n.F_{n-1} = F_n F_{n-1}, shifts in a are trivial
  JetField F = [](Index3 x) { return exp_jet(x.n, 0) * Jet::constant(std::exp(0.0)); };
  CHECK(k_value(EquationId::TASEP, F, {}, 0.5) == doctest::Approx(0.0));
  CHECK(k_value(EquationId::RBM, F, {}, 0.5) == doctest::Approx(1.0));
  JetField zero = [](Index3) { return Jet{}; };
  CHECK_THROWS_AS(k_value(EquationId::TASEP, zero, {}, 0.5), std::domain_error);
}

TEST_CASE("zero-curvature check on solver fields") {
  GridField T = F_field(Model::TASEP, InitialData::step(4), Axis::continuous(1.0, 0.5, 3), Axis::discrete(-6, 9), 1, 4,
                        {}, true);
  ZcReport rt = zc_equivalence_check(EquationId::TASEP, T);
  CHECK(rt.points > 0);
  CHECK(rt.max_mismatch < 1e-10);
  CHECK(rt.max_other < 1e-10);
  CHECK(rt.max_entry < 1e-5);

  HierarchyResult H = solve_hierarchy(Model::TASEP, InitialData::step(4), std::nullopt, 0.5,
                                      Axis::continuous(1.0, 0.5, 3), Axis::discrete(-6, 9), 1, 4);
  ZcReport rh = zc_equivalence_check(EquationId::TASEP, H.F);
  CHECK(rh.points > 0);
  CHECK(rh.max_entry < 1e-5);

  GridField noise = sample(Axis::continuous(0, 0.1, 3), Axis::discrete(-2, 6), Axis::discrete(1, 3),
                           [](double t, double a, double n) { return 2 + std::sin(t + 0.3 * a + n); });
  ZcReport rn = zc_equivalence_check(EquationId::TASEP, noise);
  CHECK(rn.points > 0);
  CHECK(rn.max_entry > 1e-3);
  CHECK(rn.max_mismatch < 1e-10);
}

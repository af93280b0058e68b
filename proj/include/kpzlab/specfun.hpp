#pragma once

#include <Eigen/Dense>

#include "kpzlab/model.hpp"

namespace kpz {

template <typename Scalar>
using Series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Truncated power series in w; all functions return the first `len` Taylor
// coefficients.

template <typename Scalar>
Series<Scalar> series_exp(Scalar c, int len) {
  Series<Scalar> s(len);
  Scalar term(1);
  for (int k = 0; k < len; ++k) {
    s(k) = term;
    term = term * c / Scalar(k + 1);
  }
  return s;
}

// (1 + s w)^m for any integer m, via the generalized binomial coefficients.
template <typename Scalar>
Series<Scalar> series_binom(long m, Scalar s, int len) {
  Series<Scalar> out(len);
  Scalar c(1);
  for (int k = 0; k < len; ++k) {
    out(k) = c;
    c = c * Scalar(m - k) / Scalar(k + 1) * s;
  }
  return out;
}

// (a0 + a1 w)^m with a0 != 0.
template <typename Scalar>
Series<Scalar> series_affine_pow(Scalar a0, Scalar a1, long m, int len) {
  using std::pow;
  return pow(a0, Scalar(m)) * series_binom<Scalar>(m, a1 / a0, len);
}

template <typename Scalar>
Series<Scalar> series_mul(const Series<Scalar>& a, const Series<Scalar>& b, int len) {
  Series<Scalar> out = Series<Scalar>::Zero(len);
  for (int i = 0; i < std::min<int>(len, a.size()); ++i)
    for (int j = 0; i + j < len && j < b.size(); ++j) out(i + j) += a(i) * b(j);
  return out;
}

// exp(f(w)) for a series with f(0) = 0, from E' = f'E.
template <typename Scalar>
Series<Scalar> series_exp_of(const Series<Scalar>& f, int len) {
  Series<Scalar> e = Series<Scalar>::Zero(len);
  if (len == 0) return e;
  e(0) = Scalar(1);
  for (int k = 1; k < len; ++k) {
    Scalar acc(0);
    for (int j = 1; j <= k && j < f.size(); ++j) acc += Scalar(j) * f(j) * e(k - j);
    e(k) = acc / Scalar(k);
  }
  return e;
}

double hermite(int n, double x);

enum class BasisKind { Phi, Phibar };

// phi_n(t,x) = t^{-n/2} H_n(x/sqrt t) e^{-x^2/2t}/sqrt(2 pi t),
// phibar_n(t,x) = t^{n/2} H_n(x/sqrt t)/n!, zero for n < 0.
double rbm_basis(BasisKind kind, int n, double t, double x);

// Coefficients of phibar_n(t, z) as a polynomial in z.
Eigen::VectorXd phibar_poly(int n, double t);

struct GenFunSpec {
  Model model = Model::TASEP;
  BasisKind kind = BasisKind::Phi;
  double t = 0.0;
  double p_or_q = 0.5;
  int n = 1;
  long a = 0;
  long arg = 0;
};

// Taylor coefficient [w^power] of the generating function attached to `spec`
// (without the 2^(...) and normalisation prefactors). Push-TASEP psi is a
// Laurent series, so negative powers are meaningful there.
double series_coefficient(const GenFunSpec& spec, long power, int trunc);

// Power index at which series_coefficient yields the basis value.
long basis_power(const GenFunSpec& spec);

// model_basis without its 2^{+-(arg-a)} factor.
double model_basis_unscaled(Model model, BasisKind kind, double t, long a, int n, long arg,
                            double p_or_q = 0.5);

// psi_{t,a,n}(arg) or phibar_{t,a,n}(arg) of a lattice model.
double model_basis(Model model, BasisKind kind, double t, long a, int n, long arg,
                   double p_or_q = 0.5);

}  // namespace kpz

namespace kpz {

// Exact t-derivative of model_basis for the continuous-time lattice models.
double model_basis_dt(Model model, BasisKind kind, double t, long a, int n, long arg);

}  // namespace kpz

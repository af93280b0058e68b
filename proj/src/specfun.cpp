#include "kpzlab/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kpz {

namespace {

constexpr int kHermiteGuard = 60;

void check_discrete(const GenFunSpec& s) {
  if (!is_discrete_time(s.model)) return;
  if (!(s.p_or_q > 0.0 && s.p_or_q < 1.0))
    throw std::invalid_argument("jump probability must lie in (0,1)");
  if (s.t < 0 || s.t != std::floor(s.t))
    throw std::invalid_argument("discrete-time models need integer t >= 0");
}

long exponent_m(const GenFunSpec& s) {
  long m = s.a - s.arg + s.n - 1;
  if (s.model == Model::Pushing) m += static_cast<long>(s.t);
  return m;
}

// [w^k] (1-w)^n e^{t/w}: finite sum because (1-w)^n is a polynomial.
double push_psi_coefficient(double t, int n, long k) {
  if (k > n) return 0.0;
  double total = 0.0;
  long j0 = std::max(0L, -k);
  double term = std::pow(t, static_cast<double>(j0)) / std::tgamma(static_cast<double>(j0) + 1);
  for (long j = j0; j <= n - k; ++j) {
    long i = k + j;
    double binom = std::tgamma(n + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(n - i + 1.0));
    total += term * ((i % 2) ? -binom : binom);
    term *= t / static_cast<double>(j + 1);
  }
  return total;
}

// Series of the t-dependent factor and of (1-w)^e, each to length len.
Series<double> entire_factor(const GenFunSpec& s, int len) {
  const double t = s.t;
  const double jump = s.p_or_q;
  switch (s.model) {
    case Model::TASEP:
      return series_exp(t, len);
    case Model::PushTASEP: {
      Series<double> f = Series<double>::Constant(len, -t);
      f(0) = 0.0;
      return series_exp_of(f, len);
    }
    case Model::Parallel: {
      double p = jump, q = 1.0 - p;
      long tt = static_cast<long>(t);
      if (s.kind == BasisKind::Phi) return series_affine_pow(q, p, tt - (s.n - 1), len);
      return series_binom(-tt + s.n - 1, -p, len);
    }
    case Model::Blocking: {
      double p = jump, q = 1.0 - p;
      long tt = static_cast<long>(t);
      if (s.kind == BasisKind::Phi) return series_affine_pow(q, p, tt, len);
      return series_binom(-tt, -p, len);
    }
    case Model::Pushing: {
      double q = jump, p = 1.0 - q;
      long tt = static_cast<long>(t);
      if (s.kind == BasisKind::Phi) return series_affine_pow(q, p, tt, len);
      return series_binom(-tt, -p, len);
    }
    case Model::RBM:
      break;
  }
  throw std::invalid_argument("RBM has no lattice generating function");
}

double pow2(long e) { return std::ldexp(1.0, static_cast<int>(e)); }

}  // namespace

double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite order must be nonnegative");
  if (n > kHermiteGuard) throw std::out_of_range("hermite order above guard");
  long double h0 = 1.0L, h1 = x;
  if (n == 0) return 1.0;
  for (int k = 1; k < n; ++k) {
    long double h2 = static_cast<long double>(x) * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return static_cast<double>(h1);
}

double rbm_basis(BasisKind kind, int n, double t, double x) {
  if (!(t > 0)) throw std::invalid_argument("rbm_basis needs t > 0");
  double s = std::sqrt(t);
  if (kind == BasisKind::Phibar) {
    if (n < 0) return 0.0;
    return std::pow(t, 0.5 * n) * hermite(n, x / s) / std::tgamma(n + 1.0);
  }
  if (n < 0) throw std::invalid_argument("phi needs n >= 0");
  double gauss = std::exp(-x * x / (2 * t)) / std::sqrt(2 * std::numbers::pi * t);
  return std::pow(t, -0.5 * n) * hermite(n, x / s) * gauss;
}

Eigen::VectorXd phibar_poly(int n, double t) {
  if (n < 0) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  for (int m = 0; 2 * m <= n; ++m) {
    double v = std::pow(-0.5 * t, m) / (std::tgamma(m + 1.0) * std::tgamma(n - 2 * m + 1.0));
    c(n - 2 * m) = v;
  }
  return c;
}

long basis_power(const GenFunSpec& s) {
  if (s.kind == BasisKind::Phibar) return s.n - 1;
  long k = s.n + s.a - s.arg;
  if (s.model == Model::Pushing) k += static_cast<long>(s.t);
  return k;
}

double series_coefficient(const GenFunSpec& s, long power, int trunc) {
  check_discrete(s);
  if (s.n < 0) throw std::invalid_argument("n must be nonnegative");
  if (s.model == Model::PushTASEP && s.kind == BasisKind::Phi)
    return push_psi_coefficient(s.t, s.n, power);
  if (power < 0) return 0.0;
  if (trunc < power + 1)
    throw std::runtime_error("series truncation shorter than the requested power");
  const int len = static_cast<int>(power) + 1;
  long e = s.kind == BasisKind::Phi ? s.n : exponent_m(s);
  Series<double> poly = series_binom<double>(e, -1.0, len);
  Series<double> ent = entire_factor(s, len);
  double c = 0.0;
  for (int j = 0; j < len; ++j) c += poly(j) * ent(len - 1 - j);
  return c;
}

double model_basis_unscaled(Model model, BasisKind kind, double t, long a, int n, long arg,
                            double p_or_q) {
  if (model == Model::RBM) throw std::invalid_argument("use rbm_basis for RBM");
  if (kind == BasisKind::Phibar && n <= 0) return 0.0;
  GenFunSpec s{model, kind, t, p_or_q, n, a, arg};
  long k = basis_power(s);
  if (k < 0 && !(model == Model::PushTASEP && kind == BasisKind::Phi)) return 0.0;
  double c = series_coefficient(s, k, static_cast<int>(std::max(0L, k)) + 1);
  if (c == 0.0) return 0.0;
  double sign = kind == BasisKind::Phi ? -1.0 : 1.0;
  double norm = 1.0;
  switch (model) {
    case Model::TASEP: norm = std::exp(-0.5 * t); break;
    case Model::PushTASEP: norm = kind == BasisKind::Phi ? std::exp(-2 * t) : std::exp(t); break;
    case Model::Parallel: {
      double p = p_or_q, q = 1 - p;
      norm = std::pow(q + 0.5 * p, sign * t) * std::pow(q, -sign * (n - 1));
      break;
    }
    case Model::Blocking: {
      double p = p_or_q, q = 1 - p;
      norm = std::pow(q + 0.5 * p, sign * t);
      break;
    }
    case Model::Pushing: {
      double q = p_or_q, p = 1 - q;
      norm = std::pow(p + 2 * q, sign * t);
      break;
    }
    case Model::RBM: break;
  }
  return norm * c;
}

double model_basis(Model model, BasisKind kind, double t, long a, int n, long arg,
                   double p_or_q) {
  double v = model_basis_unscaled(model, kind, t, a, n, arg, p_or_q);
  return v * (kind == BasisKind::Phi ? pow2(arg - a) : pow2(a - arg));
}

double model_basis_dt(Model model, BasisKind kind, double t, long a, int n, long arg) {
  if (model != Model::TASEP && model != Model::PushTASEP)
    throw std::invalid_argument("t-derivative only exists for continuous-time lattice models");
  if (kind == BasisKind::Phibar && n <= 0) return 0.0;
  GenFunSpec s{model, kind, t, 0.5, n, a, arg};
  long k = basis_power(s);
  double val;
  if (model == Model::TASEP) {
    // d/dt multiplies the integrand by (w - 1/2).
    double hi = k >= 1 ? series_coefficient(s, k - 1, static_cast<int>(k)) : 0.0;
    double lo = k >= 0 ? series_coefficient(s, k, static_cast<int>(k) + 1) : 0.0;
    val = hi - 0.5 * lo;
    double two = kind == BasisKind::Phi ? pow2(arg - a) : pow2(a - arg);
    return two * std::exp(-0.5 * t) * val;
  }
  if (kind == BasisKind::Phi) {
    // factor (1/w - 2)
    val = series_coefficient(s, k + 1, 0) - 2 * series_coefficient(s, k, 0);
    return pow2(arg - a) * std::exp(-2 * t) * val;
  }
  // factor 2 - 1/(1-w) = 1 - w - w^2 - ...
  if (k < 0) return 0.0;
  val = 0.0;
  for (long j = 0; j <= k; ++j) {
    double c = series_coefficient(s, k - j, static_cast<int>(k - j) + 1);
    val += (j == 0 ? 1.0 : -1.0) * c;
  }
  return pow2(a - arg) * std::exp(t) * val;
}

}  // namespace kpz

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace kpz {

template <typename Scalar>
struct DetResult {
  Scalar value = Scalar(1);
  Scalar log_abs = Scalar(0);
  int sign = 1;
  bool near_singular = false;
};

// det(I - M) by partially pivoted LU.
template <typename Derived>
DetResult<typename Derived::Scalar> fredholm_det(const Eigen::MatrixBase<Derived>& m,
                                                 double singular_guard = 1e-13) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::log;
  DetResult<Scalar> r;
  if (m.rows() == 0) return r;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat a = Mat::Identity(m.rows(), m.cols()) - m;
  Eigen::PartialPivLU<Mat> lu(a);
  const Mat& u = lu.matrixLU();
  Scalar scale(0);
  for (Eigen::Index i = 0; i < u.rows(); ++i) scale = std::max<Scalar>(scale, abs(u(i, i)));
  int sign = lu.permutationP().determinant();
  Scalar la(0);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    Scalar d = u(i, i);
    if (d < 0) sign = -sign;
    if (d == Scalar(0)) {
      r.value = Scalar(0);
      r.log_abs = -std::numeric_limits<Scalar>::infinity();
      r.sign = 0;
      r.near_singular = true;
      return r;
    }
    if (abs(d) < singular_guard * scale) r.near_singular = true;
    la += log(abs(d));
  }
  r.log_abs = la;
  r.sign = sign;
  r.value = Scalar(sign) * std::exp(la);
  return r;
}

// Solve (I - M) x = f with one step of iterative refinement.
template <typename DerivedM, typename DerivedF>
Eigen::Matrix<typename DerivedM::Scalar, Eigen::Dynamic, 1> resolvent_apply(
    const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedF>& f) {
  using Scalar = typename DerivedM::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Mat a = Mat::Identity(m.rows(), m.cols()) - m;
  Eigen::PartialPivLU<Mat> lu(a);
  Vec x = lu.solve(f);
  Vec res = f - a * x;
  x += lu.solve(res);
  return x;
}

// <(I - K)^{-1} f, g> under the weighted inner product sum_i w_i f_i g_i,
// where M_ij = K(u_i, u_j) w_j.
template <typename DerivedM, typename DerivedW, typename DerivedF, typename DerivedG>
typename DerivedM::Scalar resolvent_inner(const Eigen::MatrixBase<DerivedM>& m,
                                          const Eigen::MatrixBase<DerivedW>& w,
                                          const Eigen::MatrixBase<DerivedF>& f,
                                          const Eigen::MatrixBase<DerivedG>& g) {
  auto x = resolvent_apply(m, f);
  return (w.array() * x.array() * g.array()).sum();
}

}  // namespace kpz

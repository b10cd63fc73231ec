#pragma once

// Rotation-group helpers on plain Eigen matrices. Everything here is a pure
// function of its arguments and is templated on the scalar type.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cstrans/errors.hpp"

namespace cstrans {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Rotation = Eigen::Matrix3d;

/// Yaw, pitch, roll of the ZYX convention: R = Rz(yaw) Ry(pitch) Rx(roll).
template <typename Scalar>
struct EulerZYXT {
  Scalar yaw{0};
  Scalar pitch{0};
  Scalar roll{0};

  Vec3<Scalar> vector() const { return {yaw, pitch, roll}; }
  static EulerZYXT from_vector(const Vec3<Scalar>& v) { return {v(0), v(1), v(2)}; }
};
using EulerZYX = EulerZYXT<double>;

/// Skew matrix such that hat(v) * b == v.cross(b).
template <typename Derived>
Mat3<typename Derived::Scalar> hat(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using S = typename Derived::Scalar;
  Mat3<S> m;
  m << S(0), -v(2), v(1),
       v(2), S(0), -v(0),
       -v(1), v(0), S(0);
  return m;
}

/// Inverse of hat(). Throws NotSkewSymmetric when |M + M^T| exceeds tol.
template <typename Derived>
Vec3<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& m,
                                   typename Derived::Scalar tol = 1e-9) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  if ((m + m.transpose()).norm() >= tol) throw NotSkewSymmetric();
  return {m(2, 1), m(0, 2), m(1, 0)};
}

/// vee() of the skew part, without the symmetry check.
template <typename Derived>
Vec3<typename Derived::Scalar> vee_skew_part(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  return Vec3<S>(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)) * S(0.5);
}

/// Rodrigues formula; 2nd-order Taylor expansion below 1e-8 rad.
template <typename Derived>
Mat3<typename Derived::Scalar> so3_exp(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  const S theta = a.norm();
  const Mat3<S> k = hat(a);
  if (theta < S(1e-8)) return Mat3<S>::Identity() + k + S(0.5) * k * k;
  const S s = std::sin(theta) / theta;
  const S c = (S(1) - std::cos(theta)) / (theta * theta);
  return Mat3<S>::Identity() + s * k + c * k * k;
}

/// Axis-angle of a rotation, angle in [0, pi].
template <typename Derived>
Vec3<typename Derived::Scalar> so3_log(const Eigen::MatrixBase<Derived>& r) {
  using S = typename Derived::Scalar;
  const S cos_theta = std::clamp((r.trace() - S(1)) * S(0.5), S(-1), S(1));
  const S theta = std::acos(cos_theta);
  const Vec3<S> w = vee_skew_part(r);
  if (theta < S(1e-6)) return w * (S(1) + theta * theta / S(6));
  if (std::numbers::pi_v<S> - theta > S(1e-4)) return w * (theta / std::sin(theta));
  // Near pi the skew part vanishes; recover the axis from the symmetric part.
  const Mat3<S> b = ((r + r.transpose()) * S(0.5) + Mat3<S>::Identity()) * S(0.5);
  Eigen::Index i = 0;
  b.diagonal().maxCoeff(&i);
  Vec3<S> axis = b.col(i) / std::sqrt(std::max(b(i, i), S(1e-300)));
  axis.normalize();
  if (axis.dot(w) < S(0)) axis = -axis;
  return axis * theta;
}

/// Right Jacobian inverse series used by RKMK integrators with R = R0 exp(sigma):
/// sigma' = J_r^{-1}(sigma) omega, truncated after the second Bernoulli term.
template <typename D1, typename D2>
Vec3<typename D1::Scalar> dexp_inv_truncated(const Eigen::MatrixBase<D1>& sigma,
                                             const Eigen::MatrixBase<D2>& omega) {
  using S = typename D1::Scalar;
  const Vec3<S> s = sigma;
  const Vec3<S> w = omega;
  return w + S(0.5) * s.cross(w) + s.cross(s.cross(w)) / S(12);
}

template <typename S>
Mat3<S> rot_z(S a) {
  Mat3<S> r;
  r << std::cos(a), -std::sin(a), S(0), std::sin(a), std::cos(a), S(0), S(0), S(0), S(1);
  return r;
}
template <typename S>
Mat3<S> rot_y(S a) {
  Mat3<S> r;
  r << std::cos(a), S(0), std::sin(a), S(0), S(1), S(0), -std::sin(a), S(0), std::cos(a);
  return r;
}
template <typename S>
Mat3<S> rot_x(S a) {
  Mat3<S> r;
  r << S(1), S(0), S(0), S(0), std::cos(a), -std::sin(a), S(0), std::sin(a), std::cos(a);
  return r;
}

template <typename S>
Mat3<S> euler_zyx_to_rot(const EulerZYXT<S>& e) {
  return rot_z(e.yaw) * rot_y(e.pitch) * rot_x(e.roll);
}

/// Throws GimbalLock when |R(2,0)| > 1 - 1e-9.
template <typename Derived>
EulerZYXT<typename Derived::Scalar> rot_to_euler_zyx(const Eigen::MatrixBase<Derived>& r) {
  using S = typename Derived::Scalar;
  if (std::abs(r(2, 0)) > S(1) - S(1e-9)) throw GimbalLock();
  EulerZYXT<S> e;
  e.pitch = -std::asin(r(2, 0));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  e.roll = std::atan2(r(2, 1), r(2, 2));
  return e;
}

/// Body rates from ZYX Euler angles and their rates.
template <typename S>
Vec3<S> euler_zyx_rates_to_body(const EulerZYXT<S>& e, const EulerZYXT<S>& rate) {
  const S sp = std::sin(e.pitch), cp = std::cos(e.pitch);
  const S sr = std::sin(e.roll), cr = std::cos(e.roll);
  return {rate.roll - rate.yaw * sp,
          rate.pitch * cr + rate.yaw * cp * sr,
          -rate.pitch * sr + rate.yaw * cp * cr};
}

/// Wraps to (-pi, pi].
template <typename S>
S wrap_angle(S a) {
  constexpr S pi = std::numbers::pi_v<S>;
  a = std::remainder(a, S(2) * pi);
  if (a <= -pi) a += S(2) * pi;
  return a;
}

/// Nearest rotation (polar factor) of an almost-orthonormal matrix.
template <typename Derived>
Mat3<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  Eigen::JacobiSVD<Mat3<S>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3<S> r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < S(0)) {
    Mat3<S> u = svd.matrixU();
    u.col(2) = -u.col(2);
    r = u * svd.matrixV().transpose();
  }
  return r;
}

/// Attitude error 1/2 (R^T R_des - R_des^T R)^vee, zero when R == R_des.
template <typename D1, typename D2>
Vec3<typename D1::Scalar> attitude_error(const Eigen::MatrixBase<D1>& r,
                                         const Eigen::MatrixBase<D2>& r_des) {
  const Mat3<typename D1::Scalar> m = r.transpose() * r_des;
  return vee_skew_part(m);
}

}  // namespace cstrans

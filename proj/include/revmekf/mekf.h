/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

// Multiplicative Extended Kalman Filter on a 6-dimensional inner state:
// x[0:3] is the rotation vector of the orientation, x[3:6] the gyro bias.
// The update applies the correction on the right, q <- q * exp(dq), and the
// covariance describes the error in that right-multiplied tangent space.

#include "revmekf/core.h"
#include "revmekf/imu_sample.h"

#include <Eigen/Eigenvalues>

namespace revmekf
{

template<typename T>
using Vec6 = Eigen::Matrix<T, 6, 1>;
template<typename T>
using Mat6 = Eigen::Matrix<T, 6, 6>;

enum class ResidualMode
{
  kSubtractive,  // measured minus predicted direction, reference magnitude
  kMultiplicative,  // cross product of measured and predicted unit directions
};

template<typename T>
struct FilterParams
{
  Mat6<T> process_noise{Mat6<T>::Identity() * T(1e-2)};  // Q_k
  Mat6<T> measurement_noise{Mat6<T>::Identity() * T(1e2)};  // U_k
  Vec3<T> gravity_ref{T(0), T(0), T(9.81)};  // specific-force reference, global frame
  Vec3<T> mag_ref{T(1), T(0), T(0)};  // magnetic field reference, global frame
  ResidualMode residual_mode{ResidualMode::kSubtractive};
  int phi_order{2};
};

template<typename T>
struct FilterState
{
  Vec6<T> x{Vec6<T>::Zero()};
  Mat6<T> P{Mat6<T>::Identity() * T(1e-2)};

  Quaternion<T> orientation() const { return quat_exp<T>(x.template head<3>()); }
  AxisAngle<T> rotation_vector() const { return x.template head<3>(); }
  Vec3<T> bias() const { return x.template tail<3>(); }

  static FilterState from_orientation(const Quaternion<T>& q, T p0 = T(1e-2))
  {
    FilterState s;
    s.x.template head<3>() = quat_log(q.normalized());
    s.P = Mat6<T>::Identity() * p0;
    return s;
  }
};

/// Initial state from the first accelerometer/magnetometer pair (TRIAD), zero bias.
template<typename T>
FilterState<T> initialize(const Vec3<T>& accel,
                          const Vec3<T>& mag,
                          const FilterParams<T>& params,
                          T p0 = T(1e-2))
{
  return FilterState<T>::from_orientation(
      triad<T>(accel, mag, params.gravity_ref, params.mag_ref), p0);
}

/// Phi = I + F dt (+ F^2 dt^2 / 2 for order 2), F from the bias-corrected rate.
template<typename T>
Mat6<T> transition_matrix(const Vec3<T>& omega_hat, T dt, int order)
{
  Mat6<T> f = Mat6<T>::Zero();
  f.template block<3, 3>(0, 0) = -skew<T>(omega_hat);
  f.template block<3, 3>(0, 3) = -Mat3<T>::Identity();

  Mat6<T> phi = Mat6<T>::Identity() + f * dt;
  if (order >= 2)
    phi += f * f * (dt * dt / T(2));
  return phi;
}

template<typename T>
FilterState<T> predict(const FilterState<T>& s,
                       const FilterParams<T>& params,
                       const Vec3<T>& omega,
                       T dt)
{
  const Vec3<T> omega_hat = omega - s.bias();
  const Quaternion<T> q_pred = (s.orientation() * quat_exp<T>(omega_hat * dt)).normalized();

  FilterState<T> out;
  out.x.template head<3>() = quat_log(q_pred);
  out.x.template tail<3>() = s.bias();

  const Mat6<T> phi = transition_matrix<T>(omega_hat, dt, params.phi_order);
  out.P = phi * s.P * phi.transpose() + params.process_noise;
  return out;
}

/// Measurement Jacobian. The reference vectors are taken in the relative frame,
/// R(q)^T g and R(q)^T b. The bias columns are zero.
template<typename T>
Mat6<T> build_H(const Quaternion<T>& q, const FilterParams<T>& params)
{
  const Quaternion<T> q_inv = q.conjugate();
  const Vec3<T> g_rel = rotate_vec(q_inv, params.gravity_ref);
  const Vec3<T> b_rel = rotate_vec(q_inv, params.mag_ref);

  Mat6<T> h = Mat6<T>::Zero();
  if (params.residual_mode == ResidualMode::kSubtractive)
  {
    h.template block<3, 3>(0, 0) = skew<T>(g_rel);
    h.template block<3, 3>(3, 0) = skew<T>(b_rel);
  }
  else
  {
    const Vec3<T> gu = g_rel.normalized();
    const Vec3<T> bu = b_rel.normalized();
    h.template block<3, 3>(0, 0) = Mat3<T>::Identity() - gu * gu.transpose();
    h.template block<3, 3>(3, 0) = Mat3<T>::Identity() - bu * bu.transpose();
  }
  return h;
}

namespace detail
{
template<typename T>
Vec3<T> rescaled(const Vec3<T>& v, T magnitude)
{
  const T n = v.norm();
  return n > T(0) ? Vec3<T>(v * (magnitude / n)) : v;
}
} // namespace detail

/// Innovation y for the predicted orientation q. The error state is reset to
/// zero after every update, so the linearized prediction H x of the residual
/// vanishes and y is the residual itself.
template<typename T>
Vec6<T> innovation(const Quaternion<T>& q,
                   const FilterParams<T>& params,
                   const Vec3<T>& accel,
                   const Vec3<T>& mag)
{
  const Quaternion<T> q_inv = q.conjugate();
  const Vec3<T> g_rel = rotate_vec(q_inv, params.gravity_ref);
  const Vec3<T> b_rel = rotate_vec(q_inv, params.mag_ref);

  Vec6<T> y;
  if (params.residual_mode == ResidualMode::kSubtractive)
  {
    y.template head<3>() = detail::rescaled<T>(accel, params.gravity_ref.norm()) - g_rel;
    y.template tail<3>() = detail::rescaled<T>(mag, params.mag_ref.norm()) - b_rel;
  }
  else
  {
    y.template head<3>() = detail::rescaled<T>(accel, T(1)).cross(g_rel.normalized());
    y.template tail<3>() = detail::rescaled<T>(mag, T(1)).cross(b_rel.normalized());
  }
  return y;
}

template<typename T>
FilterState<T> update(const FilterState<T>& s,
                      const FilterParams<T>& params,
                      const Vec3<T>& accel,
                      const Vec3<T>& mag)
{
  using std::abs;

  const Quaternion<T> q_pred = s.orientation();
  const Mat6<T> h = build_H(q_pred, params);
  const Vec6<T> y = innovation(q_pred, params, accel, mag);

  Mat6<T> innov_cov = h * s.P * h.transpose() + params.measurement_noise;
  innov_cov = (innov_cov + innov_cov.transpose()) / T(2);

  const Eigen::SelfAdjointEigenSolver<Mat6<T>> eig(innov_cov, Eigen::EigenvaluesOnly);
  const T lo = eig.eigenvalues().minCoeff();
  const T hi = eig.eigenvalues().maxCoeff();
  if (!(lo > T(0)) || hi / lo > T(1e12))
    throw SingularInnovation("update: innovation covariance is singular or ill-conditioned");

  // K = P H^T S^-1, solved as K^T = S^-1 H P with the Cholesky factor of S.
  const Eigen::LLT<Mat6<T>> llt(innov_cov);
  if (llt.info() != Eigen::Success)
    throw SingularInnovation("update: innovation covariance is not positive definite");
  const Mat6<T> gain = llt.solve(h * s.P).transpose();

  const Vec6<T> correction = gain * y;
  const Quaternion<T> q = (q_pred * quat_exp<T>(correction.template head<3>())).normalized();

  FilterState<T> out;
  out.x.template head<3>() = quat_log(q);
  out.x.template tail<3>() = s.bias() + correction.template tail<3>();
  const Mat6<T> p = (Mat6<T>::Identity() - gain * h) * s.P;
  out.P = (p + p.transpose()) / T(2);
  return out;
}

template<typename T>
FilterState<T> mekf_step(const FilterState<T>& s,
                         const FilterParams<T>& params,
                         const ImuSample& sample,
                         T dt)
{
  const FilterState<T> pred = predict<T>(s, params, sample.omega.cast<T>(), dt);
  return update<T>(pred, params, sample.accel.cast<T>(), sample.mag.cast<T>());
}

} // namespace revmekf

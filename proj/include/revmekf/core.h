/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

// Quaternion and rotation algebra on SO(3).
//
// Every routine is a template over the scalar type. The scalar must provide
// the field operations, comparison, sqrt, sin, cos, atan2 and acos reachable
// through argument-dependent lookup (double and long double qualify). The
// rest of the library is written against the same parameter.
//
// Conventions:
//   - Quaternions are stored (w, x, y, z), Hamilton product.
//   - An orientation q maps relative-frame vectors to the global frame:
//     v_global = rotate_vec(q, v_relative).
//   - exp(v) = (cos(|v|/2), v/|v| sin(|v|/2)): the rotation vector v has the
//     rotation angle |v| and its half-angle enters the quaternion.

#include "revmekf/errors.h"

#include <cmath>

#include <Eigen/Dense>

namespace revmekf
{

template<typename T>
using Vec3 = Eigen::Matrix<T, 3, 1>;
template<typename T>
using Mat3 = Eigen::Matrix<T, 3, 3>;
template<typename T>
using Mat4 = Eigen::Matrix<T, 4, 4>;

/// Rotation vector: angle times unit axis, radians.
template<typename T>
using AxisAngle = Vec3<T>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

template<typename T>
inline T pi()
{
  using std::acos;
  static const T value = acos(T(-1));
  return value;
}

// Below this rotation angle exp/log switch to their Taylor expansions.
template<typename T>
inline T small_angle_threshold()
{
  return T(1e-8);
}

template<typename T>
struct Quaternion
{
  T w{1};
  T x{0};
  T y{0};
  T z{0};

  constexpr Quaternion() = default;
  constexpr Quaternion(T w_, T x_, T y_, T z_) : w(w_), x(x_), y(y_), z(z_) {}
  Quaternion(T w_, const Vec3<T>& v) : w(w_), x(v.x()), y(v.y()), z(v.z()) {}

  static Quaternion identity() { return {}; }

  /// Pure quaternion (0|v).
  static Quaternion pure(const Vec3<T>& v) { return Quaternion(T(0), v); }

  Vec3<T> vec() const { return Vec3<T>(x, y, z); }
  Eigen::Matrix<T, 4, 1> coeffs() const { return {w, x, y, z}; }

  T squared_norm() const { return w * w + x * x + y * y + z * z; }
  T norm() const
  {
    using std::sqrt;
    return sqrt(squared_norm());
  }

  Quaternion normalized() const
  {
    const T n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Quaternion conjugate() const { return {w, -x, -y, -z}; }

  Quaternion inverse() const
  {
    const T n2 = squared_norm();
    return {w / n2, -x / n2, -y / n2, -z / n2};
  }

  /// Representative of the double cover with w >= 0.
  Quaternion canonical() const { return w < T(0) ? Quaternion(-w, -x, -y, -z) : *this; }

  Quaternion operator-() const { return {-w, -x, -y, -z}; }

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b)
  {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }

  template<typename U>
  Quaternion<U> cast() const
  {
    return {static_cast<U>(w), static_cast<U>(x), static_cast<U>(y), static_cast<U>(z)};
  }
};

using Quaterniond = Quaternion<double>;

template<typename T>
inline Quaternion<T> quat_mul(const Quaternion<T>& a, const Quaternion<T>& b)
{
  return a * b;
}

template<typename T>
inline Quaternion<T> quat_exp(const AxisAngle<T>& v)
{
  using std::cos;
  using std::sin;
  using std::sqrt;

  const T angle2 = v.squaredNorm();
  const T angle = sqrt(angle2);
  if (angle < small_angle_threshold<T>())
  {
    // cos(a/2) ~ 1 - a^2/8, sin(a/2)/a ~ 1/2 - a^2/48
    return Quaternion<T>(T(1) - angle2 / T(8), v * (T(0.5) - angle2 / T(48)));
  }
  const T half = angle / T(2);
  return Quaternion<T>(cos(half), v * (sin(half) / angle));
}

/// Rotation vector of q, canonical (norm in [0, pi]).
template<typename T>
inline AxisAngle<T> quat_log(const Quaternion<T>& q)
{
  using std::abs;
  using std::atan2;
  using std::sqrt;

  if (abs(q.norm() - T(1)) > T(1e-9))
    throw InvalidQuaternion("quat_log: quaternion is not unit norm");

  const Quaternion<T> c = q.canonical();
  const Vec3<T> u = c.vec();
  const T s = u.norm();
  const T angle = T(2) * atan2(s, c.w);
  if (angle < small_angle_threshold<T>())
  {
    // 2 atan(s/w)/s ~ (2/w)(1 - s^2/(3 w^2))
    return u * (T(2) / c.w * (T(1) - s * s / (T(3) * c.w * c.w)));
  }
  return u * (angle / s);
}

/// Maps a rotation vector into the canonical range |v| <= pi.
template<typename T>
inline AxisAngle<T> canonicalize(const AxisAngle<T>& v)
{
  return quat_log(quat_exp(v));
}

template<typename T>
inline Mat3<T> skew(const Vec3<T>& w)
{
  Mat3<T> m;
  m << T(0), -w.z(), w.y(), //
      w.z(), T(0), -w.x(),  //
      -w.y(), w.x(), T(0);
  return m;
}

/// R(q): v_global = R(q) v_relative.
template<typename T>
inline Mat3<T> to_rotation_matrix(const Quaternion<T>& q)
{
  const T w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3<T> r;
  r << T(1) - T(2) * (y * y + z * z), T(2) * (x * y - w * z), T(2) * (x * z + w * y), //
      T(2) * (x * y + w * z), T(1) - T(2) * (x * x + z * z), T(2) * (y * z - w * x),  //
      T(2) * (x * z - w * y), T(2) * (y * z + w * x), T(1) - T(2) * (x * x + y * y);
  return r;
}

/// Unit quaternion of a rotation matrix (Shepperd's method), canonical sign.
template<typename T>
inline Quaternion<T> from_rotation_matrix(const Mat3<T>& m)
{
  using std::sqrt;

  const T trace = m.trace();
  Quaternion<T> q;
  if (trace >= m(0, 0) && trace >= m(1, 1) && trace >= m(2, 2))
  {
    const T s = sqrt(T(1) + trace) * T(2);
    q = {s / T(4), (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s, (m(1, 0) - m(0, 1)) / s};
  }
  else if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2))
  {
    const T s = sqrt(T(1) + m(0, 0) - m(1, 1) - m(2, 2)) * T(2);
    q = {(m(2, 1) - m(1, 2)) / s, s / T(4), (m(0, 1) + m(1, 0)) / s, (m(0, 2) + m(2, 0)) / s};
  }
  else if (m(1, 1) >= m(2, 2))
  {
    const T s = sqrt(T(1) + m(1, 1) - m(0, 0) - m(2, 2)) * T(2);
    q = {(m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, s / T(4), (m(1, 2) + m(2, 1)) / s};
  }
  else
  {
    const T s = sqrt(T(1) + m(2, 2) - m(0, 0) - m(1, 1)) * T(2);
    q = {(m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s, (m(1, 2) + m(2, 1)) / s, s / T(4)};
  }
  return q.normalized().canonical();
}

template<typename T>
inline Vec3<T> rotate_vec(const Quaternion<T>& q, const Vec3<T>& v)
{
  // q (0|v) q^-1 for unit q, expanded: v + 2w (u x v) + 2 u x (u x v)
  const Vec3<T> u = q.vec();
  const Vec3<T> t = T(2) * u.cross(v);
  return v + q.w * t + u.cross(t);
}

/// Rotation about a x b taking a/|a| onto b/|b|.
template<typename T>
inline Quaternion<T> rotation_between(const Vec3<T>& a, const Vec3<T>& b)
{
  if (!(a.norm() > T(0)) || !(b.norm() > T(0)))
    throw AmbiguousRotation("rotation_between: zero-length input");

  const Vec3<T> an = a.normalized();
  const Vec3<T> bn = b.normalized();
  const T c = an.dot(bn);
  if (T(1) + c < T(1e-12))
    throw AmbiguousRotation("rotation_between: antiparallel inputs");

  // Half-way construction: (1 + cos a, sin a * axis) normalizes to the exact half-angle form.
  return Quaternion<T>(T(1) + c, an.cross(bn)).normalized();
}

/// Bi-invariant angle between two orientations, radians in [0, pi].
template<typename T>
inline T geodesic_distance(const Quaternion<T>& a, const Quaternion<T>& b)
{
  return quat_log((a.conjugate() * b).normalized()).norm();
}

/// TRIAD attitude: the orientation taking (accel, mag) onto (g_ref, b_ref), with
/// the accelerometer axis matched exactly and the magnetometer used for azimuth.
template<typename T>
inline Quaternion<T> triad(const Vec3<T>& accel,
                           const Vec3<T>& mag,
                           const Vec3<T>& g_ref,
                           const Vec3<T>& b_ref)
{
  const auto frame = [](const Vec3<T>& primary, const Vec3<T>& secondary) {
    const Vec3<T> t1 = primary.normalized();
    const Vec3<T> c = primary.cross(secondary);
    if (!(c.norm() > T(1e-12) * primary.norm() * secondary.norm()))
      throw AmbiguousRotation("triad: reference vectors are parallel");
    const Vec3<T> t2 = c.normalized();
    Mat3<T> f;
    f.col(0) = t1;
    f.col(1) = t2;
    f.col(2) = t1.cross(t2);
    return f;
  };
  const Mat3<T> body = frame(accel, mag);
  const Mat3<T> global = frame(g_ref, b_ref);
  return from_rotation_matrix<T>(global * body.transpose());
}

} // namespace revmekf

/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

// Plane-constrained gravity recovery.
//
// The magnetometer fixes the orientation up to one angle: every rotation that
// takes the measured field M onto the reference b is exp(theta b) q', where q'
// is the shortest rotation M -> b. Along that family the vertical velocity
// increment
//
//   h(theta) = (v_prev - g dt + R(theta) A dt) . n,   R(theta) = exp(theta b) q'
//
// is an offset sinusoid in theta. Its zeros are the orientations for which the
// measured specific force keeps the motion on the plane with normal n. The zero
// closest to the gyro prediction theta0 yields the corrected gravity R^-1 g.

#include "revmekf/core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace revmekf
{

template<typename T>
struct PlaneConstraint
{
  Vec3<T> normal{T(0), T(0), T(1)};
  Vec3<T> gravity_ref{T(0), T(0), T(9.81)};
  Vec3<T> mag_ref{T(1), T(0), T(0)};

  /// Builds a constraint with the normal rescaled to unit length.
  static PlaneConstraint make(const Vec3<T>& n, const Vec3<T>& g, const Vec3<T>& b)
  {
    if (!(n.norm() > T(0)))
      throw ConfigError("plane normal must be nonzero");
    return {n.normalized(), g, b};
  }
};

template<typename T>
struct ThetaSolution
{
  T theta{0};
  Quaternion<T> rotation;
  T distance_to_pred{0};
};

template<typename T>
struct GeoContext
{
  Quaternion<T> q_pred;
  Quaternion<T> q_prime;
  T theta0{0};
  Vec3<T> accel{Vec3<T>::Zero()};
  T dt{0};
  PlaneConstraint<T> constraint;
  // Previous velocity; zero for motion on a fixed plane through the origin.
  Vec3<T> prev_velocity{Vec3<T>::Zero()};

  Vec3<T> axis() const { return constraint.mag_ref.normalized(); }
};

/// Wraps an angle into (-pi, pi].
template<typename T>
T wrap_angle(T a)
{
  using std::remainder;
  const T two_pi = T(2) * pi<T>();
  T r = remainder(a, two_pi);
  if (r <= -pi<T>())
    r += two_pi;
  return r;
}

template<typename T>
Quaternion<T> base_rotation(const Vec3<T>& mag, const Vec3<T>& b_ref)
{
  return rotation_between<T>(mag, b_ref);
}

/// Closed-form argmin over theta of |log(q_pred q'^-1) - theta b|: the
/// projection of the rotation vector onto the b line.
template<typename T>
T theta_zero(const Quaternion<T>& q_pred, const Quaternion<T>& q_prime, const Vec3<T>& b_ref)
{
  return quat_log((q_pred * q_prime.conjugate()).normalized()).dot(b_ref.normalized());
}

template<typename T>
GeoContext<T> make_context(const Quaternion<T>& q_pred,
                           const Vec3<T>& accel,
                           const Vec3<T>& mag,
                           T dt,
                           const PlaneConstraint<T>& constraint,
                           const Vec3<T>& prev_velocity = Vec3<T>::Zero())
{
  GeoContext<T> ctx;
  ctx.q_pred = q_pred;
  ctx.q_prime = base_rotation<T>(mag, constraint.mag_ref);
  ctx.theta0 = theta_zero<T>(q_pred, ctx.q_prime, constraint.mag_ref);
  ctx.accel = accel;
  ctx.dt = dt;
  ctx.constraint = constraint;
  ctx.prev_velocity = prev_velocity;
  return ctx;
}

/// Member of the magnetometer-consistent family at angle theta.
template<typename T>
Quaternion<T> family_rotation(T theta, const GeoContext<T>& ctx)
{
  return (quat_exp<T>(ctx.axis() * theta) * ctx.q_prime).normalized();
}

/// Vertical velocity increment if the sensor had orientation `rotation`.
template<typename T>
T plane_residual(const Quaternion<T>& rotation, const GeoContext<T>& ctx)
{
  const auto& c = ctx.constraint;
  const Vec3<T> dv = ctx.prev_velocity - c.gravity_ref * ctx.dt + rotate_vec(rotation, ctx.accel) * ctx.dt;
  return dv.dot(c.normal);
}

template<typename T>
T h_k(T theta, const GeoContext<T>& ctx)
{
  return plane_residual<T>(family_rotation<T>(theta, ctx), ctx);
}

template<typename T>
T root_tolerance(const GeoContext<T>& ctx)
{
  return T(1e-10) * ctx.constraint.gravity_ref.norm() * ctx.dt;
}

/// h(theta) = c0 + c1 cos(theta) + c2 sin(theta).
template<typename T>
struct SinusoidCoefficients
{
  T c0{0};
  T c1{0};
  T c2{0};
};

template<typename T>
SinusoidCoefficients<T> sinusoid_coefficients(const GeoContext<T>& ctx)
{
  const T h0 = h_k<T>(T(0), ctx);
  const T h90 = h_k<T>(pi<T>() / T(2), ctx);
  const T h180 = h_k<T>(pi<T>(), ctx);
  SinusoidCoefficients<T> c;
  c.c0 = (h0 + h180) / T(2);
  c.c1 = (h0 - h180) / T(2);
  c.c2 = h90 - c.c0;
  return c;
}

namespace detail
{
// Sign-change scan with bisection, used when the sinusoid amplitude vanishes
// and only rounding structure is left.
template<typename T>
std::vector<T> bisection_roots(const GeoContext<T>& ctx, T tol)
{
  constexpr int kCells = 256;
  constexpr int kIterations = 200;
  std::vector<T> roots;
  const T step = T(2) * pi<T>() / T(kCells);
  T a = -pi<T>();
  T ha = h_k<T>(a, ctx);
  for (int i = 0; i < kCells && roots.size() < 2; ++i)
  {
    const T b = -pi<T>() + step * T(i + 1);
    const T hb = h_k<T>(b, ctx);
    if ((ha <= T(0) && hb >= T(0)) || (ha >= T(0) && hb <= T(0)))
    {
      T lo = a, hi = b, hlo = ha;
      for (int it = 0; it < kIterations && hi - lo > T(0); ++it)
      {
        const T mid = (lo + hi) / T(2);
        const T hm = h_k<T>(mid, ctx);
        if ((hm <= T(0)) == (hlo <= T(0)))
        {
          lo = mid;
          hlo = hm;
        }
        else
        {
          hi = mid;
        }
      }
      const T root = (lo + hi) / T(2);
      using std::abs;
      if (abs(h_k<T>(root, ctx)) <= tol)
        roots.push_back(wrap_angle<T>(root));
    }
    a = b;
    ha = hb;
  }
  return roots;
}
} // namespace detail

/// All zeros of h in (-pi, pi]; at most two since h is an offset sinusoid.
template<typename T>
std::vector<ThetaSolution<T>> solve_roots(const GeoContext<T>& ctx)
{
  using std::abs;
  using std::acos;
  using std::atan2;
  using std::hypot;

  const T tol = root_tolerance(ctx);
  const SinusoidCoefficients<T> c = sinusoid_coefficients(ctx);
  const T amplitude = hypot(c.c1, c.c2);

  std::vector<T> thetas;
  if (abs(c.c1) < T(1e-14) && abs(c.c2) < T(1e-14))
  {
    thetas = detail::bisection_roots<T>(ctx, tol);
  }
  else
  {
    // h = c0 + amplitude cos(theta - phase)
    const T phase = atan2(c.c2, c.c1);
    if (abs(abs(c.c0) - amplitude) <= tol)
    {
      // Tangent: the extremum touches zero.
      thetas.push_back(c.c0 < T(0) ? phase : phase + pi<T>());
    }
    else if (abs(c.c0) < amplitude)
    {
      const T spread = acos(-c.c0 / amplitude);
      thetas.push_back(phase - spread);
      thetas.push_back(phase + spread);
    }
  }

  std::vector<ThetaSolution<T>> out;
  for (T theta : thetas)
  {
    theta = wrap_angle<T>(theta);
    T value = h_k<T>(theta, ctx);
    // Newton polish for the rare ill-conditioned acos.
    for (int it = 0; it < 3 && abs(value) > tol; ++it)
    {
      using std::cos;
      using std::sin;
      const T slope = -c.c1 * sin(theta) + c.c2 * cos(theta);
      if (!(abs(slope) > T(0)))
        break;
      theta = wrap_angle<T>(theta - value / slope);
      value = h_k<T>(theta, ctx);
    }
    if (!(abs(value) <= tol))
      continue;
    ThetaSolution<T> sol;
    sol.theta = theta;
    sol.rotation = family_rotation<T>(theta, ctx);
    sol.distance_to_pred = geodesic_distance<T>(ctx.q_pred, sol.rotation);
    out.push_back(sol);
  }
  return out;
}

/// Root closest to theta0 in wrapped angle; ties go to the smaller theta.
template<typename T>
ThetaSolution<T> select_rotation(const std::vector<ThetaSolution<T>>& solutions, T theta0)
{
  using std::abs;
  if (solutions.empty())
    throw NoIntersection("select_rotation: no root of the plane constraint");

  const ThetaSolution<T>* best = &solutions.front();
  T best_dist = abs(wrap_angle<T>(best->theta - theta0));
  for (const auto& s : solutions)
  {
    const T d = abs(wrap_angle<T>(s.theta - theta0));
    if (d < best_dist || (d == best_dist && s.theta < best->theta))
    {
      best = &s;
      best_dist = d;
    }
  }
  return *best;
}

/// Gravity as it would be measured in the selected orientation. Replaces the raw
/// accelerometer in the update step.
template<typename T>
Vec3<T> corrected_gravity(const ThetaSolution<T>& sol, const GeoContext<T>& ctx)
{
  return rotate_vec(sol.rotation.conjugate(), ctx.constraint.gravity_ref);
}

} // namespace revmekf

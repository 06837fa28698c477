/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

// Heuristic Rev-MEKF: predict, solve the plane constraint, then update with
// either the geometrically corrected gravity or the raw accelerometer.
//
// The corrected gravity is used only when the intersection rotation closest to
// the prediction is gamma times closer than the rotation implied by the raw
// accelerometer and magnetometer (TRIAD). Small gamma approaches the plain
// reversible filter, large gamma the plain MEKF; gamma = +inf never corrects.

#include "revmekf/geo.h"
#include "revmekf/mekf.h"

#include <cstddef>
#include <limits>
#include <vector>

namespace revmekf
{

template<typename T>
struct HeuristicConfig
{
  T gamma{1};
  // Use the unit X axis in place of the configured magnetic reference.
  bool use_predicted_mag_ref{false};
  PlaneConstraint<T> constraint;
};

enum class Choice
{
  kRev,
  kMekf,
};

template<typename T>
struct StepDecision
{
  Choice chosen{Choice::kMekf};
  T dist_rev{std::numeric_limits<T>::infinity()};
  T dist_default{std::numeric_limits<T>::infinity()};
  std::size_t roots_found{0};
};

template<typename T>
struct RevStepResult
{
  FilterState<T> state;
  StepDecision<T> decision;
};

/// Magnetic reference in use, global frame.
template<typename T>
Vec3<T> effective_mag_ref(const HeuristicConfig<T>& cfg)
{
  if (cfg.use_predicted_mag_ref)
    return Vec3<T>::UnitX();
  return cfg.constraint.mag_ref;
}

/// Predicted magnetometer direction in the relative frame.
template<typename T>
Vec3<T> mag_reference(const Quaternion<T>& q_pred, const HeuristicConfig<T>& cfg)
{
  return rotate_vec(q_pred.conjugate(), effective_mag_ref(cfg));
}

template<typename T>
StepDecision<T> decide(const Quaternion<T>& q_pred,
                       const std::vector<ThetaSolution<T>>& roots,
                       const Quaternion<T>& default_rotation,
                       const HeuristicConfig<T>& cfg,
                       T theta0)
{
  StepDecision<T> d;
  d.roots_found = roots.size();
  d.dist_default = geodesic_distance<T>(q_pred, default_rotation);
  if (roots.empty())
    return d;

  d.dist_rev = select_rotation<T>(roots, theta0).distance_to_pred;
  // NaN from 0 * inf compares false and keeps the MEKF branch.
  if (d.dist_rev * cfg.gamma <= d.dist_default)
    d.chosen = Choice::kRev;
  return d;
}

/// Everything the decision is made from at one sample. Exposed so decisions
/// can be replayed on fixed inputs.
template<typename T>
struct GeoStep
{
  GeoContext<T> ctx;
  std::vector<ThetaSolution<T>> roots;
  Quaternion<T> default_rotation;
  bool default_valid{false};
};

template<typename T>
GeoStep<T> geo_step(const Quaternion<T>& q_pred,
                    const Vec3<T>& accel,
                    const Vec3<T>& mag,
                    T dt,
                    const HeuristicConfig<T>& cfg)
{
  PlaneConstraint<T> constraint = cfg.constraint;
  constraint.mag_ref = effective_mag_ref(cfg);

  GeoStep<T> g;
  try
  {
    g.ctx = make_context<T>(q_pred, accel, mag, dt, constraint);
    g.roots = solve_roots(g.ctx);
  }
  catch (const AmbiguousRotation&)
  {
    // Magnetometer antiparallel to the reference: degenerate measurement.
    g.roots.clear();
  }
  try
  {
    g.default_rotation = triad<T>(accel, mag, constraint.gravity_ref, constraint.mag_ref);
    g.default_valid = true;
  }
  catch (const AmbiguousRotation&)
  {
    g.default_valid = false;
  }
  return g;
}

template<typename T>
StepDecision<T> decide(const GeoStep<T>& g, const Quaternion<T>& q_pred, const HeuristicConfig<T>& cfg)
{
  if (g.default_valid)
    return decide<T>(q_pred, g.roots, g.default_rotation, cfg, g.ctx.theta0);

  StepDecision<T> d;
  d.roots_found = g.roots.size();
  if (!g.roots.empty())
  {
    d.dist_rev = select_rotation<T>(g.roots, g.ctx.theta0).distance_to_pred;
    if (d.dist_rev * cfg.gamma <= d.dist_default)
      d.chosen = Choice::kRev;
  }
  return d;
}

/// Filter parameters as seen by the update step of the heuristic filter.
template<typename T>
FilterParams<T> effective_params(const FilterParams<T>& params, const HeuristicConfig<T>& cfg)
{
  FilterParams<T> p = params;
  if (cfg.use_predicted_mag_ref)
    p.mag_ref = Vec3<T>::UnitX();
  return p;
}

template<typename T>
RevStepResult<T> rev_mekf_step(const FilterState<T>& s,
                               const FilterParams<T>& params,
                               const HeuristicConfig<T>& cfg,
                               const ImuSample& sample,
                               T dt)
{
  const FilterParams<T> p = effective_params(params, cfg);
  const Vec3<T> accel = sample.accel.cast<T>();
  const Vec3<T> mag = sample.mag.cast<T>();

  const FilterState<T> pred = predict<T>(s, p, sample.omega.cast<T>(), dt);
  const Quaternion<T> q_pred = pred.orientation();

  const GeoStep<T> g = geo_step<T>(q_pred, accel, mag, dt, cfg);
  RevStepResult<T> out;
  out.decision = decide<T>(g, q_pred, cfg);

  if (out.decision.chosen == Choice::kRev)
  {
    const ThetaSolution<T> sel = select_rotation<T>(g.roots, g.ctx.theta0);
    out.state = update<T>(pred, p, corrected_gravity<T>(sel, g.ctx), mag);
  }
  else
  {
    out.state = update<T>(pred, p, accel, mag);
  }
  return out;
}

} // namespace revmekf

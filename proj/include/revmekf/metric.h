/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include "revmekf/core.h"
#include "revmekf/imu_sample.h"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace revmekf
{

/// Cumulative Lambda values, one per sample.
template<typename T>
struct MetricSeries
{
  std::vector<T> values;
  std::vector<double> t;

  T final_value() const { return values.empty() ? T(0) : values.back(); }
};

/// Per-sample term |1 - Re(exp(x) exp(-y))|. The relative quaternion is taken
/// on the w >= 0 sheet, so the term only depends on the two rotations.
/// Evaluated as |v|^2 / (1 + |w|), which equals 1 - |w| for a unit quaternion
/// and does not cancel for nearby rotations.
template<typename T>
T lambda_term(const AxisAngle<T>& x, const AxisAngle<T>& y)
{
  using std::abs;
  const Quaternion<T> a = quat_exp<T>(x);
  const Quaternion<T> b = quat_exp<T>(y);
  // a * b^-1, grouped so that a == b cancels exactly.
  const T w = a.w * b.w + a.vec().dot(b.vec());
  const Vec3<T> v = (b.w * a.vec() - a.w * b.vec()) - a.vec().cross(b.vec());
  return v.squaredNorm() / (T(1) + abs(w));
}

template<typename T>
MetricSeries<T> lambda_series(const OrientationTrace<T>& x,
                              const OrientationTrace<T>& y,
                              const std::vector<double>& t = {})
{
  if (x.size() != y.size())
    throw TraceMismatch("lambda_series: traces have " + std::to_string(x.size()) + " and "
                        + std::to_string(y.size()) + " samples");
  if (!t.empty() && t.size() != x.size())
    throw TraceMismatch("lambda_series: time axis length differs from the traces");

  MetricSeries<T> out;
  out.values.reserve(x.size());
  out.t = t;
  T acc(0);
  for (std::size_t k = 0; k < x.size(); ++k)
  {
    acc += lambda_term<T>(x[k], y[k]);
    out.values.push_back(acc);
  }
  return out;
}

/// Delta(k) = Lambda(X_mekf, T)_k - Lambda(X_rev, T)_k.
template<typename T>
std::vector<T> delta_series(const MetricSeries<T>& lam_mekf, const MetricSeries<T>& lam_rev)
{
  if (lam_mekf.values.size() != lam_rev.values.size())
    throw TraceMismatch("delta_series: metric series lengths differ");
  std::vector<T> d(lam_mekf.values.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = lam_mekf.values[k] - lam_rev.values[k];
  return d;
}

struct IntervalScore
{
  double t_start{0.0};
  double t_end{0.0};
  double percentage{0.0};
  std::size_t n_samples{0};
};

struct ScoreTable
{
  std::vector<IntervalScore> intervals;
  IntervalScore total;
};

/// Percentage of strict increases Delta(k) > Delta(k-1) inside contiguous
/// windows aligned to the first timestamp. Pairs are counted within a window;
/// the last window may be partial.
ScoreTable interval_scores(const std::vector<double>& delta,
                           const std::vector<double>& t,
                           double window);

/// Axis-angle trace of a quaternion sequence.
template<typename T>
OrientationTrace<T> to_trace(const std::vector<Quaternion<T>>& qs)
{
  OrientationTrace<T> out;
  out.reserve(qs.size());
  for (const auto& q : qs)
    out.push_back(quat_log(q.normalized()));
  return out;
}

/// Normalized arithmetic mean with every quaternion aligned to the first one's sign.
template<typename T>
Quaternion<T> mean_quaternion(const std::vector<Quaternion<T>>& qs)
{
  if (qs.empty())
    throw DataError("mean_quaternion: empty input");
  Eigen::Matrix<T, 4, 1> acc = Eigen::Matrix<T, 4, 1>::Zero();
  const auto ref = qs.front().coeffs();
  for (const auto& q : qs)
  {
    const auto c = q.coeffs();
    acc += c.dot(ref) < T(0) ? Eigen::Matrix<T, 4, 1>(-c) : c;
  }
  return Quaternion<T>(acc(0), acc(1), acc(2), acc(3)).normalized();
}

/// Constant ground truth for a static recording: mean of the per-sample TRIAD
/// orientations. Samples whose TRIAD is degenerate are skipped.
template<typename T>
Quaternion<T> static_ground_truth(const ImuStream& samples, const Vec3<T>& g_ref, const Vec3<T>& b_ref)
{
  std::vector<Quaternion<T>> qs;
  qs.reserve(samples.size());
  for (const auto& s : samples)
  {
    try
    {
      qs.push_back(triad<T>(s.accel.cast<T>(), s.mag.cast<T>(), g_ref, b_ref));
    }
    catch (const AmbiguousRotation&)
    {
    }
  }
  return mean_quaternion(qs);
}

} // namespace revmekf

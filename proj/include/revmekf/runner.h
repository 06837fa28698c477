/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include "revmekf/heuristic.h"
#include "revmekf/mekf.h"

#include <optional>
#include <string>
#include <vector>

namespace revmekf
{

enum class FilterKind
{
  kGyroOnly,
  kMekf,
  kRevMekf,
};

FilterKind parse_filter_kind(const std::string& name);
std::string to_string(FilterKind kind);

template<typename T>
struct RunOptions
{
  FilterKind kind{FilterKind::kRevMekf};
  FilterParams<T> params;
  HeuristicConfig<T> heuristic;
  T initial_covariance{T(1e-2)};
  // Start from this orientation when set, else from TRIAD on the first sample.
  std::optional<Quaternion<T>> initial_orientation;
};

template<typename T>
struct RunResult
{
  std::vector<double> t;
  // Entry 0 is the initial state; entry k the state after sample k.
  OrientationTrace<T> trace;
  std::vector<Quaternion<T>> orientations;
  std::vector<Vec3<T>> biases;
  // Gyro-only predictions; entry 0 repeats the initial orientation.
  std::vector<Quaternion<T>> predictions;
  // Heuristic decisions; entry 0 is a placeholder. Only filled for kRevMekf.
  std::vector<StepDecision<T>> decisions;
  FilterState<T> final_state;
};

template<typename T>
RunResult<T> run_filter(const ImuStream& stream, RunOptions<T> opt)
{
  if (stream.empty())
    throw DataError("run_filter: empty stream");
  // The constraint solves against the same references as the update.
  opt.heuristic.constraint.gravity_ref = opt.params.gravity_ref;
  opt.heuristic.constraint.mag_ref = opt.params.mag_ref;

  FilterState<T> s;
  if (opt.initial_orientation)
    s = FilterState<T>::from_orientation(*opt.initial_orientation, opt.initial_covariance);
  else
    s = initialize<T>(stream.front().accel.template cast<T>(),
                      stream.front().mag.template cast<T>(),
                      opt.kind == FilterKind::kRevMekf ? effective_params(opt.params, opt.heuristic)
                                                       : opt.params,
                      opt.initial_covariance);

  RunResult<T> r;
  const std::size_t n = stream.size();
  r.t.reserve(n);
  r.trace.reserve(n);
  r.orientations.reserve(n);
  r.biases.reserve(n);
  r.predictions.reserve(n);
  if (opt.kind == FilterKind::kRevMekf)
    r.decisions.reserve(n);

  const auto record = [&r](const FilterState<T>& st, double t) {
    r.t.push_back(t);
    r.trace.push_back(st.rotation_vector());
    r.orientations.push_back(st.orientation());
    r.biases.push_back(st.bias());
  };
  record(s, stream.front().t);
  r.predictions.push_back(s.orientation());
  if (opt.kind == FilterKind::kRevMekf)
    r.decisions.emplace_back();

  for (std::size_t k = 1; k < n; ++k)
  {
    const ImuSample& sample = stream[k];
    const T dt = T(sample.t - stream[k - 1].t);
    if (!(dt > T(0)))
      throw DataError("run_filter: timestamps must be strictly increasing");
    switch (opt.kind)
    {
      case FilterKind::kGyroOnly:
        s = predict<T>(s, opt.params, sample.omega.template cast<T>(), dt);
        r.predictions.push_back(s.orientation());
        break;
      case FilterKind::kMekf:
        r.predictions.push_back(predict<T>(s, opt.params, sample.omega.template cast<T>(), dt).orientation());
        s = mekf_step<T>(s, opt.params, sample, dt);
        break;
      case FilterKind::kRevMekf:
      {
        r.predictions.push_back(
            predict<T>(s, effective_params(opt.params, opt.heuristic), sample.omega.template cast<T>(), dt)
                .orientation());
        RevStepResult<T> step = rev_mekf_step<T>(s, opt.params, opt.heuristic, sample, dt);
        s = step.state;
        r.decisions.push_back(step.decision);
        break;
      }
    }
    record(s, sample.t);
  }
  r.final_state = s;
  return r;
}

} // namespace revmekf

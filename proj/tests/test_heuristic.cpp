/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/heuristic.h"
#include "revmekf/metric.h"
#include "revmekf/runner.h"
#include "revmekf/synth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace revmekf;

namespace
{
HeuristicConfig<double> config(double gamma, const Vec3d& normal = Vec3d(0.0, -1.0, 1.0))
{
  HeuristicConfig<double> h;
  h.gamma = gamma;
  h.constraint = PlaneConstraint<double>::make(normal, Vec3d(0.0, 0.0, 9.81), Vec3d(1.0, 0.0, 0.0));
  return h;
}

ThetaSolution<double> root_at(const Quaterniond& q, const Quaterniond& q_pred)
{
  ThetaSolution<double> s;
  s.rotation = q;
  s.distance_to_pred = geodesic_distance(q_pred, q);
  return s;
}

struct Scenario
{
  GroundTruth truth;
  ImuStream samples;
};

Scenario noisy_motion(double accel_noise, double scale = 2.0)
{
  TrajectoryConfig c;
  c.accel_scale = scale;
  c.n_samples = 300;
  c.seed = 21;
  NoiseSpec n;
  n.accel_noise_std = accel_noise;
  n.gyro_noise_std = 1e-3;
  n.mag_noise_std = 1e-3;
  n.seed = 22;
  Scenario s;
  s.truth = generate_truth(c);
  s.samples = inject_noise(derive_measurements(s.truth, c), n);
  return s;
}
} // namespace

TEST(HeuristicTest, MagReferenceExamples)
{
  HeuristicConfig<double> h = config(1.0);
  h.use_predicted_mag_ref = true;
  EXPECT_LT((mag_reference(Quaterniond::identity(), h) - Vec3d(1.0, 0.0, 0.0)).norm(), 1e-15);
  const Quaterniond qz = quat_exp<double>(Vec3d(0.0, 0.0, pi<double>() / 2.0));
  EXPECT_LT((mag_reference(qz, h) - Vec3d(0.0, -1.0, 0.0)).norm(), 1e-15);

  h.use_predicted_mag_ref = false;
  h.constraint.mag_ref = Vec3d(0.0, 0.0, 2.0);
  const Quaterniond qx = quat_exp<double>(Vec3d(pi<double>() / 2.0, 0.0, 0.0));
  EXPECT_LT((mag_reference(qx, h) - Vec3d(0.0, 2.0, 0.0)).norm(), 1e-15);
}

TEST(HeuristicTest, DecideRule)
{
  const HeuristicConfig<double> h = config(1.0);
  const Quaterniond q_pred = quat_exp<double>(Vec3d(0.1, 0.2, 0.3));
  const Quaterniond far = quat_exp<double>(Vec3d(0.5, 0.2, 0.3));

  const StepDecision<double> none = decide<double>(q_pred, {}, far, h, 0.0);
  EXPECT_EQ(none.chosen, Choice::kMekf);
  EXPECT_EQ(none.roots_found, 0u);

  for (double gamma : {1e-3, 0.5, 1.0})
  {
    const StepDecision<double> d = decide<double>(q_pred, {root_at(q_pred, q_pred)}, far, config(gamma), 0.0);
    EXPECT_EQ(d.chosen, Choice::kRev);
    EXPECT_LE(d.dist_rev, 1e-15);
  }

  // Root at 0.2 rad, default at 0.4 rad: rev up to gamma = 2.
  const Quaterniond near = quat_exp<double>(Vec3d(0.3, 0.2, 0.3));
  EXPECT_EQ(decide<double>(q_pred, {root_at(near, q_pred)}, far, config(1.9), 0.0).chosen, Choice::kRev);
  EXPECT_EQ(decide<double>(q_pred, {root_at(near, q_pred)}, far, config(2.1), 0.0).chosen, Choice::kMekf);

  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(decide<double>(q_pred, {root_at(q_pred, q_pred)}, far, config(inf), 0.0).chosen, Choice::kMekf);
}

TEST(HeuristicTest, NoiselessPlanarRunIsExact)
{
  TrajectoryConfig c;
  c.accel_scale = 1.0;
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  RunOptions<double> opt;
  opt.heuristic = config(1.0, c.normal);
  opt.initial_orientation = truth.front().q;
  const RunResult<double> r = run_filter<double>(m, opt);
  const auto lam = lambda_series<double>(r.trace, to_trace(truth_orientations(truth)));
  EXPECT_LE(lam.final_value(), 100.0 * 1e-10);
  for (std::size_t k = 1; k < r.decisions.size(); ++k)
    EXPECT_EQ(r.decisions[k].chosen, Choice::kRev);
}

TEST(HeuristicTest, PredictedMagReferenceKeepsMagInnovationSmall)
{
  TrajectoryConfig c;
  c.accel_scale = 1.0;
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  RunOptions<double> opt;
  opt.heuristic = config(1.0, c.normal);
  opt.heuristic.use_predicted_mag_ref = true;
  opt.initial_orientation = truth.front().q;
  const RunResult<double> r = run_filter<double>(m, opt);
  for (std::size_t k = 0; k < r.orientations.size(); ++k)
  {
    const Vec3d predicted = mag_reference(r.orientations[k], opt.heuristic);
    EXPECT_LT((predicted - m[k].mag.normalized()).norm(), 1e-10);
  }
}

TEST(HeuristicTest, InfiniteGammaMatchesMekf)
{
  const Scenario s = noisy_motion(0.05);
  RunOptions<double> opt;
  opt.heuristic = config(std::numeric_limits<double>::infinity());
  opt.initial_orientation = s.truth.front().q;
  const RunResult<double> rev = run_filter<double>(s.samples, opt);
  opt.kind = FilterKind::kMekf;
  const RunResult<double> mekf = run_filter<double>(s.samples, opt);
  for (std::size_t k = 0; k < rev.trace.size(); ++k)
    EXPECT_LE((rev.trace[k] - mekf.trace[k]).norm(), 1e-14);
}

TEST(HeuristicTest, LoggedDecisionsAreSound)
{
  const Scenario s = noisy_motion(0.05);
  for (double gamma : {0.25, 1.0, 4.0})
  {
    RunOptions<double> opt;
    opt.heuristic = config(gamma);
    opt.initial_orientation = s.truth.front().q;
    const RunResult<double> r = run_filter<double>(s.samples, opt);
    for (std::size_t k = 1; k < r.decisions.size(); ++k)
    {
      const auto& d = r.decisions[k];
      if (d.chosen == Choice::kRev)
      {
        EXPECT_GE(d.roots_found, 1u);
        EXPECT_LE(d.dist_rev * gamma, d.dist_default);
      }
    }
  }
}

TEST(HeuristicTest, StaticNoisyStreamRarelyCorrects)
{
  TrajectoryConfig c;
  c.accel_scale = 0.0;
  c.normal = Vec3d::UnitZ();
  c.n_samples = 1000;
  NoiseSpec n;
  n.accel_noise_std = 0.05;
  n.seed = 4;
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = inject_noise(derive_measurements(truth, c), n);
  RunOptions<double> opt;
  opt.heuristic = config(1.0, c.normal);
  opt.initial_orientation = truth.front().q;
  const RunResult<double> r = run_filter<double>(m, opt);
  std::size_t rev = 0;
  for (std::size_t k = 1; k < r.decisions.size(); ++k)
    rev += r.decisions[k].chosen == Choice::kRev;
  EXPECT_LT(static_cast<double>(rev), 0.05 * static_cast<double>(r.decisions.size() - 1));
}

namespace
{
// Measurement seen from the orientation before sample k: gyro reversed and the
// body-frame vectors rotated by the gyro increment.
ImuSample inverse_measurement(const ImuSample& m, double dt)
{
  const Quaterniond h = quat_exp<double>(Vec3d(m.omega * dt));
  return ImuSample{m.t, -m.omega, rotate_vec(h, m.accel), rotate_vec(h, m.mag)};
}
} // namespace

TEST(HeuristicTest, StrongReversibilityOnNoiselessPlanarData)
{
  TrajectoryConfig c;
  c.accel_scale = 2.0;
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  FilterParams<double> params;
  const HeuristicConfig<double> h = config(1.0, c.normal);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;

  for (std::size_t k : {5u, 30u, 60u, 99u})
  {
    const double dt = m[k].t - m[k - 1].t;
    const FilterState<double> u = FilterState<double>::from_orientation(truth[k - 1].q);
    const RevStepResult<double> fwd = rev_mekf_step<double>(u, params, h, m[k], dt);
    ASSERT_EQ(fwd.decision.chosen, Choice::kRev);
    EXPECT_LT(geodesic_distance(fwd.state.orientation(), truth[k].q), 1e-12);

    const ImuSample inv = inverse_measurement(m[k], dt);
    const RevStepResult<double> back = rev_mekf_step<double>(fwd.state, params, h, inv, dt);
    ASSERT_EQ(back.decision.chosen, Choice::kRev);
    EXPECT_LE(lambda_term<double>(back.state.rotation_vector(), u.rotation_vector()), 1e-10);

    // Accelerometer error eps moves the returned state by at most C eps.
    const Vec3d dir = Vec3d(nd(rng), nd(rng), nd(rng)).normalized();
    double worst = 0.0;
    for (double eps : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5})
    {
      ImuSample noisy = inv;
      noisy.accel += eps * dir;
      const RevStepResult<double> r = rev_mekf_step<double>(fwd.state, params, h, noisy, dt);
      const Vec6<double> err = r.state.x - u.x;
      worst = std::max(worst, err.norm() / eps);
    }
    EXPECT_LT(worst, 100.0) << "k=" << k;
  }
}

TEST(HeuristicTest, MekfRoundTripFailsWithExternalAcceleration)
{
  TrajectoryConfig c;
  c.accel_scale = 2.0;
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  const FilterParams<double> params;
  const std::size_t k = 30;
  const double dt = m[k].t - m[k - 1].t;
  const FilterState<double> u = FilterState<double>::from_orientation(truth[k - 1].q);
  const FilterState<double> fwd = mekf_step<double>(u, params, m[k], dt);
  const FilterState<double> back = mekf_step<double>(fwd, params, inverse_measurement(m[k], dt), dt);
  EXPECT_GT(geodesic_distance(back.orientation(), truth[k - 1].q), 1e-6);
}

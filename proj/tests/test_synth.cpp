/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/mekf.h"
#include "revmekf/runner.h"
#include "revmekf/synth.h"

#include <gtest/gtest.h>

#include <cmath>

using namespace revmekf;

namespace
{
// 1 - |<q1, q2>| equals |1 - |Re(q1 q2^-1)||, computed without the library.
double orientation_gap(const Quaterniond& a, const Quaterniond& b)
{
  return std::abs(1.0 - std::abs(a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z));
}

TrajectoryConfig moving(double scale, std::uint64_t seed = 3)
{
  TrajectoryConfig c;
  c.accel_scale = scale;
  c.seed = seed;
  return c;
}
} // namespace

TEST(SynthTest, RejectsInvalidConfig)
{
  TrajectoryConfig c;
  c.normal = Vec3d(1.0, 1.0, 0.0);
  EXPECT_THROW(generate_truth(c), ConfigError);
  c = TrajectoryConfig{};
  c.dt = 0.0;
  EXPECT_THROW(generate_truth(c), ConfigError);
  c = TrajectoryConfig{};
  c.n_samples = 1;
  EXPECT_THROW(generate_truth(c), ConfigError);
}

TEST(SynthTest, StaticCase)
{
  const GroundTruth truth = generate_truth(moving(0.0));
  for (const auto& s : truth)
  {
    EXPECT_EQ(s.p, Vec3d::Zero());
    EXPECT_EQ(s.v, Vec3d::Zero());
    EXPECT_EQ(s.q.coeffs(), truth.front().q.coeffs());
  }
  const ImuStream m = derive_measurements(truth, moving(0.0));
  const Vec3d expected = rotate_vec(truth.front().q.conjugate(), Vec3d(0.0, 0.0, 9.81));
  for (const auto& s : m)
  {
    EXPECT_LT(s.omega.norm(), 1e-15);
    EXPECT_LT((s.accel - expected).norm(), 1e-14);
    EXPECT_LT((s.mag - m.front().mag).norm(), 1e-15);
  }
}

TEST(SynthTest, PlanarityHolds)
{
  for (const Vec3d& n : {Vec3d(0.0, -1.0, 1.0), Vec3d(0.0, 0.0, 1.0), Vec3d(0.0, 0.0, -1.0), Vec3d(1.0, 2.0, -3.0)})
  {
    TrajectoryConfig c = moving(5.0, 9);
    c.normal = n.normalized();
    for (const auto& s : generate_truth(c))
    {
      EXPECT_LE(std::abs(s.p.dot(c.normal)), 1e-10);
      EXPECT_LE(std::abs(s.v.dot(c.normal)), 1e-10);
      // Body z stays on the normal.
      EXPECT_LT((rotate_vec(s.q, Vec3d(Vec3d::UnitZ())) - c.normal).norm(), 1e-12);
    }
  }
}

TEST(SynthTest, Deterministic)
{
  const GroundTruth a = generate_truth(moving(2.0, 42));
  const GroundTruth b = generate_truth(moving(2.0, 42));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k)
  {
    EXPECT_EQ(a[k].p, b[k].p);
    EXPECT_EQ(a[k].q.coeffs(), b[k].q.coeffs());
  }
  const GroundTruth c = generate_truth(moving(2.0, 43));
  EXPECT_NE(a.back().p, c.back().p);
}

TEST(SynthTest, HeadingDoesNotDependOnScale)
{
  const GroundTruth a = generate_truth(moving(1e-3));
  const GroundTruth b = generate_truth(moving(10.0));
  for (std::size_t k = 0; k < a.size(); ++k)
    EXPECT_EQ(a[k].q.coeffs(), b[k].q.coeffs());
}

TEST(SynthTest, GyroReintegrationReproducesTruth)
{
  const TrajectoryConfig c = moving(1.0);
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  Quaterniond q = truth.front().q;
  double worst = 0.0;
  for (std::size_t k = 1; k < m.size(); ++k)
  {
    q = q * quat_exp<double>(Vec3d(m[k].omega * (m[k].t - m[k - 1].t)));
    worst = std::max(worst, orientation_gap(q, truth[k].q));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(SynthTest, AccelerationMatchesFiniteDifferences)
{
  const TrajectoryConfig c = moving(3.0);
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  const Vec3d g = c.gravity_ref();
  for (std::size_t k = 1; k + 1 < truth.size(); ++k)
  {
    const Vec3d fd = (truth[k + 1].p - 2.0 * truth[k].p + truth[k - 1].p) / (c.dt * c.dt);
    const Vec3d recovered = rotate_vec(truth[k].q, m[k].accel) - g;
    EXPECT_LT((recovered - fd).norm(), 1e-9) << "k=" << k;
  }
}

TEST(SynthTest, MagnetometerIsBodyFrameField)
{
  const TrajectoryConfig c = moving(1.0);
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  for (std::size_t k = 0; k < m.size(); ++k)
    EXPECT_LT((rotate_vec(truth[k].q, m[k].mag) - c.mag_field).norm(), 1e-14);
}

TEST(SynthTest, ZeroNoiseIsIdentity)
{
  const TrajectoryConfig c = moving(1.0);
  const ImuStream m = derive_measurements(generate_truth(c), c);
  const ImuStream n = inject_noise(m, NoiseSpec{});
  for (std::size_t k = 0; k < m.size(); ++k)
  {
    EXPECT_EQ(m[k].omega, n[k].omega);
    EXPECT_EQ(m[k].accel, n[k].accel);
    EXPECT_EQ(m[k].mag, n[k].mag);
  }
}

TEST(SynthTest, BiasOnlyShiftsRate)
{
  const TrajectoryConfig c = moving(1.0);
  const ImuStream m = derive_measurements(generate_truth(c), c);
  NoiseSpec spec;
  spec.gyro_bias = Vec3d(1e-3, -2e-3, 0.5e-3);
  const ImuStream n = inject_noise(m, spec);
  for (std::size_t k = 0; k < m.size(); ++k)
  {
    EXPECT_EQ(n[k].omega, Vec3d(m[k].omega + spec.gyro_bias));
    EXPECT_EQ(n[k].accel, m[k].accel);
  }
}

TEST(SynthTest, NoiseStatistics)
{
  ImuStream zero(100000);
  for (std::size_t k = 0; k < zero.size(); ++k)
    zero[k].t = static_cast<double>(k);
  NoiseSpec spec;
  spec.gyro_noise_std = 0.01;
  spec.accel_noise_std = 0.5;
  spec.mag_noise_std = 0.02;
  spec.seed = 5;
  const ImuStream n = inject_noise(zero, spec);
  const auto stddev = [&](auto get) {
    double s = 0.0, s2 = 0.0;
    for (const auto& x : n)
      for (int i = 0; i < 3; ++i)
      {
        const double v = get(x)(i);
        s += v;
        s2 += v * v;
      }
    const double cnt = 3.0 * static_cast<double>(n.size());
    const double mean = s / cnt;
    return std::sqrt(s2 / cnt - mean * mean);
  };
  EXPECT_NEAR(stddev([](const ImuSample& x) { return x.omega; }), 0.01, 0.05 * 0.01);
  EXPECT_NEAR(stddev([](const ImuSample& x) { return x.accel; }), 0.5, 0.05 * 0.5);
  EXPECT_NEAR(stddev([](const ImuSample& x) { return x.mag; }), 0.02, 0.05 * 0.02);

  const ImuStream again = inject_noise(zero, spec);
  EXPECT_EQ(again[777].accel, n[777].accel);
}

TEST(SynthTest, RngIsPortableMersenneTwister)
{
  // First output of the standard 64-bit Mersenne Twister with its default seed.
  std::mt19937_64 ref(5489u);
  Rng rng(5489u);
  const double expected = static_cast<double>(ref() >> 11) * 0x1.0p-53;
  EXPECT_EQ(rng.uniform(), expected);
}

TEST(SynthTest, GyroOnlyIntegrationIsExact)
{
  const TrajectoryConfig c = moving(1.0);
  const GroundTruth truth = generate_truth(c);
  const ImuStream m = derive_measurements(truth, c);
  RunOptions<double> opt;
  opt.kind = FilterKind::kGyroOnly;
  opt.initial_orientation = truth.front().q;
  const RunResult<double> r = run_filter<double>(m, opt);
  double total = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    total += orientation_gap(r.orientations[k], truth[k].q);
  EXPECT_LE(total, static_cast<double>(truth.size()) * 1e-12);
}

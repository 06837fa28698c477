/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

// Synthetic planar trajectories and their IMU measurements.
//
// The in-plane path is x(t) = V t + sum a_i sin(w_i t + phi_i),
// y(t) = sum b_i sin(w_i t + psi_i) with V > sum |a_i w_i|, so the heading
// atan2(y', x') stays inside (-pi/2, pi/2) and does not depend on the scale.
// Positions are the 2D path times accel_scale mapped onto the plane. Body z is
// aligned with the plane normal and the body yaws with the velocity heading.
//
// Random numbers come from std::mt19937_64 (the standardized 64-bit Mersenne
// Twister). Uniform doubles use the top 53 bits, (x >> 11) * 2^-53, and normals
// use the Box-Muller transform on two uniforms, returning the cosine branch
// first and the sine branch on the next call.

#include "revmekf/core.h"
#include "revmekf/imu_sample.h"

#include <cstdint>
#include <random>
#include <vector>

namespace revmekf
{

struct TrajectoryConfig
{
  std::size_t n_samples{100};
  double dt{0.01};
  Vec3d normal{Vec3d(0.0, -1.0, 1.0).normalized()};
  std::uint64_t seed{1};
  double accel_scale{1.0};
  double gravity_mag{9.81};
  Vec3d mag_field{1.0, 0.0, 0.0};

  /// Throws ConfigError on a violated invariant.
  void validate() const;

  Vec3d gravity_ref() const { return {0.0, 0.0, gravity_mag}; }
};

struct TruthSample
{
  double t{0.0};
  Quaterniond q;
  Vec3d p{Vec3d::Zero()};
  Vec3d v{Vec3d::Zero()};
  // External (non-gravitational) acceleration, global frame.
  Vec3d a{Vec3d::Zero()};
};

using GroundTruth = std::vector<TruthSample>;

struct NoiseSpec
{
  double gyro_noise_std{0.0};
  Vec3d gyro_bias{Vec3d::Zero()};
  double accel_noise_std{0.0};
  double mag_noise_std{0.0};
  std::uint64_t seed{1};

  void validate() const;
};

/// Portable seeded generator, see the file comment for the algorithm.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

private:
  std::mt19937_64 engine_;
  bool has_spare_{false};
  double spare_{0.0};
};

/// Rotation taking body z onto the plane normal.
Quaterniond plane_alignment(const Vec3d& normal);

GroundTruth generate_truth(const TrajectoryConfig& cfg);

ImuStream derive_measurements(const GroundTruth& truth, const TrajectoryConfig& cfg);

ImuStream inject_noise(const ImuStream& stream, const NoiseSpec& spec);

/// Orientation column of a truth sequence.
std::vector<Quaterniond> truth_orientations(const GroundTruth& truth);

} // namespace revmekf

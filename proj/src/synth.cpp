/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/synth.h"

#include <array>
#include <cmath>
#include <string>

namespace revmekf
{

void TrajectoryConfig::validate() const
{
  if (std::abs(normal.norm() - 1.0) > 1e-12)
    throw ConfigError("trajectory normal must have unit length, got norm "
                      + std::to_string(normal.norm()));
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("trajectory dt must be positive");
  if (n_samples < 2)
    throw ConfigError("trajectory needs at least 2 samples");
  if (!(accel_scale >= 0.0) || !std::isfinite(accel_scale))
    throw ConfigError("accel_scale must be finite and nonnegative");
  if (!(gravity_mag > 0.0))
    throw ConfigError("gravity_mag must be positive");
  if (!(mag_field.norm() > 0.0))
    throw ConfigError("mag_field must be nonzero");
}

void NoiseSpec::validate() const
{
  if (!(gyro_noise_std >= 0.0) || !(accel_noise_std >= 0.0) || !(mag_noise_std >= 0.0))
    throw ConfigError("noise standard deviations must be nonnegative");
  if (!gyro_bias.allFinite())
    throw ConfigError("gyro bias must be finite");
}

double Rng::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
  if (has_spare_)
  {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the logarithm argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * pi<double>() * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Quaterniond plane_alignment(const Vec3d& normal)
{
  const Vec3d n = normal.normalized();
  if (n.z() < -1.0 + 1e-12)
    return quat_exp<double>(Vec3d(pi<double>(), 0.0, 0.0));
  return rotation_between<double>(Vec3d::UnitZ(), n);
}

namespace
{
struct PlanarPath
{
  double speed{0.0};
  std::array<double, 3> a{}, b{}, w{}, phase_x{}, phase_y{};

  Eigen::Vector2d position(double t) const
  {
    Eigen::Vector2d p(speed * t, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
    {
      p.x() += a[i] * std::sin(w[i] * t + phase_x[i]);
      p.y() += b[i] * std::sin(w[i] * t + phase_y[i]);
    }
    return p;
  }

  Eigen::Vector2d velocity(double t) const
  {
    Eigen::Vector2d v(speed, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
    {
      v.x() += a[i] * w[i] * std::cos(w[i] * t + phase_x[i]);
      v.y() += b[i] * w[i] * std::cos(w[i] * t + phase_y[i]);
    }
    return v;
  }
};

PlanarPath random_path(Rng& rng)
{
  PlanarPath path;
  double rate_sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
  {
    path.w[i] = rng.uniform(0.5, 3.0);
    path.a[i] = rng.uniform(-1.0, 1.0);
    path.b[i] = rng.uniform(-1.0, 1.0);
    path.phase_x[i] = rng.uniform(0.0, 2.0 * pi<double>());
    path.phase_y[i] = rng.uniform(0.0, 2.0 * pi<double>());
    rate_sum += std::abs(path.a[i] * path.w[i]);
  }
  path.speed = 1.5 * rate_sum + 0.1;
  return path;
}
} // namespace

GroundTruth generate_truth(const TrajectoryConfig& cfg)
{
  cfg.validate();
  Rng rng(cfg.seed);
  const PlanarPath path = random_path(rng);

  const Quaterniond align = plane_alignment(cfg.normal);
  // In-plane basis, re-orthogonalized against the exact normal.
  Vec3d e1 = rotate_vec(align, Vec3d(Vec3d::UnitX()));
  e1 = (e1 - e1.dot(cfg.normal) * cfg.normal).normalized();
  const Vec3d e2 = cfg.normal.cross(e1);

  const bool is_static = cfg.accel_scale == 0.0;
  const std::size_t n = cfg.n_samples;

  // Positions for k = -1 .. n so every sample has a central second difference.
  std::vector<Eigen::Vector2d> p2(n + 2);
  for (std::size_t j = 0; j < n + 2; ++j)
  {
    const double t = (static_cast<double>(j) - 1.0) * cfg.dt;
    p2[j] = is_static ? Eigen::Vector2d::Zero() : Eigen::Vector2d(cfg.accel_scale * path.position(t));
  }
  const auto to_plane = [&](const Eigen::Vector2d& u) -> Vec3d { return u.x() * e1 + u.y() * e2; };

  GroundTruth truth(n);
  for (std::size_t k = 0; k < n; ++k)
  {
    const std::size_t j = k + 1;
    TruthSample& s = truth[k];
    s.t = static_cast<double>(k) * cfg.dt;
    s.p = to_plane(p2[j]);
    s.v = to_plane((p2[j] - p2[j - 1]) / cfg.dt);
    s.a = to_plane((p2[j + 1] - 2.0 * p2[j] + p2[j - 1]) / (cfg.dt * cfg.dt));

    double yaw = 0.0;
    if (!is_static)
    {
      const Eigen::Vector2d d = path.velocity(s.t);
      yaw = std::atan2(d.y(), d.x());
    }
    s.q = (align * quat_exp<double>(Vec3d(0.0, 0.0, yaw))).normalized();
  }
  return truth;
}

ImuStream derive_measurements(const GroundTruth& truth, const TrajectoryConfig& cfg)
{
  if (truth.size() < 2)
    throw DataError("derive_measurements: truth needs at least 2 samples");

  const Vec3d g = cfg.gravity_ref();
  ImuStream out(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k)
  {
    const TruthSample& s = truth[k];
    const Quaterniond q_inv = s.q.conjugate();
    ImuSample& m = out[k];
    m.t = s.t;
    m.accel = rotate_vec(q_inv, Vec3d(g + s.a));
    m.mag = rotate_vec(q_inv, cfg.mag_field);
    if (k > 0)
    {
      const double dt = s.t - truth[k - 1].t;
      m.omega = quat_log((truth[k - 1].q.conjugate() * s.q).normalized()) / dt;
    }
  }
  // The first sample has no previous state; repeat the next rate.
  out[0].omega = out[1].omega;
  return out;
}

ImuStream inject_noise(const ImuStream& stream, const NoiseSpec& spec)
{
  spec.validate();
  Rng rng(spec.seed);
  ImuStream out = stream;
  for (auto& s : out)
  {
    for (int i = 0; i < 3; ++i)
      s.omega(i) += spec.gyro_bias(i) + spec.gyro_noise_std * rng.normal();
    for (int i = 0; i < 3; ++i)
      s.accel(i) += spec.accel_noise_std * rng.normal();
    for (int i = 0; i < 3; ++i)
      s.mag(i) += spec.mag_noise_std * rng.normal();
  }
  return out;
}

std::vector<Quaterniond> truth_orientations(const GroundTruth& truth)
{
  std::vector<Quaterniond> qs;
  qs.reserve(truth.size());
  for (const auto& s : truth)
    qs.push_back(s.q);
  return qs;
}

} // namespace revmekf

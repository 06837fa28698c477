/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include "revmekf/core.h"

#include <vector>

namespace revmekf
{

/// One timestamped IMU reading, all vectors in the relative (sensor) frame.
struct ImuSample
{
  double t{0.0};  // s
  Vec3d omega{Vec3d::Zero()};  // rad/s
  Vec3d accel{Vec3d::Zero()};  // m/s^2, specific force
  Vec3d mag{Vec3d::Zero()};  // direction of the magnetic field
};

using ImuStream = std::vector<ImuSample>;

/// Per-sample orientation as canonical rotation vectors.
template<typename T>
using OrientationTrace = std::vector<AxisAngle<T>>;

} // namespace revmekf

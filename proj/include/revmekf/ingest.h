/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

// Common CSV schema: header row t,gx,gy,gz,ax,ay,az,mx,my,mz[,qw,qx,qy,qz].
// Doubles are written in shortest round-trip form, so write -> parse -> write
// is byte-identical.

#include "revmekf/core.h"
#include "revmekf/imu_sample.h"
#include "revmekf/synth.h"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revmekf
{

enum class GyroUnit
{
  kRadPerSec,
  kDegPerSec,
};

enum class AccelUnit
{
  kMetersPerSec2,
  kStandardGravity,
};

enum class TruthSource
{
  kInline,
  kSeparateFile,
  kNone,
};

// Standard gravity, used for the g accelerometer unit.
inline constexpr double kStandardGravity = 9.80665;

struct DatasetSpec
{
  // Canonical channel name -> header name in the file.
  std::map<std::string, std::string> column_map;
  GyroUnit gyro_unit{GyroUnit::kRadPerSec};
  AccelUnit accel_unit{AccelUnit::kMetersPerSec2};
  bool mag_normalize{false};
  // Body vectors are mapped through v' = P v.
  Mat3d axis_permutation{Mat3d::Identity()};
  TruthSource gt_source{TruthSource::kInline};
  // Truth file for kSeparateFile, relative paths resolve against base_dir.
  std::string gt_path;
  std::string base_dir;

  /// Header name for a canonical channel.
  std::string column(const std::string& canonical) const;
  void validate() const;
};

/// Canonical channel names in schema order.
const std::vector<std::string>& imu_columns();
const std::vector<std::string>& quaternion_columns();

DatasetSpec dataset_spec_from_json(std::string_view text, const std::string& base_dir = {});
DatasetSpec load_dataset_spec(const std::string& path);

struct AlignedRun
{
  ImuStream samples;
  std::optional<std::vector<Quaterniond>> truth;
};

AlignedRun parse_csv(std::istream& in, const DatasetSpec& spec);
AlignedRun parse_csv(const std::string& path, const DatasetSpec& spec);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
/// Parses a whole field; throws ParseError with `line` on failure.
double parse_double(std::string_view field, std::size_t line);

void write_csv(std::ostream& out,
               const ImuStream& samples,
               const std::vector<Quaterniond>* truth = nullptr);
void write_csv(const std::string& path,
               const ImuStream& samples,
               const std::vector<Quaterniond>* truth = nullptr);

/// Truth table: t,qw,qx,qy,qz,px,py,pz,vx,vy,vz.
void write_truth_csv(const std::string& path, const GroundTruth& truth);

/// Geodesic interpolation of a truth trace onto sample times. Samples up to one
/// truth period outside the truth span are extrapolated along the end segment.
std::vector<Quaterniond> resample_truth(const std::vector<double>& truth_times,
                                        const std::vector<Quaterniond>& truth_quats,
                                        const std::vector<double>& sample_times);

/// Splits one CSV line on commas; surrounding blanks are trimmed.
std::vector<std::string_view> split_fields(std::string_view line);

} // namespace revmekf

/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include "revmekf/runner.h"
#include "revmekf/synth.h"

#include <optional>
#include <string>
#include <string_view>

namespace revmekf
{

struct SynthConfig
{
  TrajectoryConfig trajectory;
  NoiseSpec noise;
};

enum class InitMode
{
  kAuto,  // truth when available, else TRIAD
  kTruth,
  kTriad,
};

struct RunConfig
{
  FilterKind filter{FilterKind::kRevMekf};
  FilterParams<double> params;
  double gamma{1.0};
  bool use_predicted_mag_ref{false};
  Vec3d normal{Vec3d(0.0, -1.0, 1.0).normalized()};
  double p0{1e-2};
  InitMode init{InitMode::kAuto};

  // Exactly one input source: a CSV file (with an optional dataset spec) or
  // an in-memory synthetic stream.
  std::optional<std::string> input;
  std::optional<std::string> dataset;
  std::optional<SynthConfig> synth;
  // Use the mean TRIAD orientation as truth when the input has none.
  bool static_truth{false};

  std::string output_dir{"."};
  double window{1.0};

  void validate() const;
  RunOptions<double> run_options() const;
};

SynthConfig synth_config_from_json(std::string_view text);
SynthConfig load_synth_config(const std::string& path);

/// Relative paths inside the config resolve against base_dir.
RunConfig run_config_from_json(std::string_view text, const std::string& base_dir = {});
RunConfig load_run_config(const std::string& path);

/// 36 numbers, row-major, separated by blanks, commas or newlines.
Mat6<double> load_matrix6(const std::string& path);

/// Accepts a number or the strings "inf" / "+inf".
double parse_gamma(std::string_view text);

} // namespace revmekf

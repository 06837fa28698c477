/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include "revmekf/config.h"
#include "revmekf/ingest.h"
#include "revmekf/metric.h"
#include "revmekf/runner.h"

#include <iosfwd>
#include <optional>
#include <string>

namespace revmekf
{

/// Samples and truth for a run config, from CSV or generated in memory.
AlignedRun load_input(const RunConfig& cfg);

struct RunOutcome
{
  RunResult<double> result;
  std::optional<MetricSeries<double>> lambda;
};

RunOutcome execute_run(const RunConfig& cfg, const AlignedRun& input);

/// Table layout: one row per window plus a total row.
std::string format_score_table(const ScoreTable& table);
void write_score_csv(const std::string& path, const ScoreTable& table);

// Each command writes its files under the output directory and a short
// summary to `log`. Errors are thrown; the CLI maps them to exit codes.

/// imu.csv (with inline truth quaternions) and truth.csv.
void cmd_synth(const SynthConfig& cfg, const std::string& out_dir, std::ostream& log);

/// estimate.csv, lambda.csv when truth exists, decisions.csv for rev_mekf.
void cmd_run(const RunConfig& cfg, std::ostream& log);

/// delta.csv (Lambda_a - Lambda_b) and scores.csv; the table goes to `log`.
void cmd_compare(const RunConfig& a, const RunConfig& b, double window, std::ostream& log, bool concurrent = true);

struct ScoreInputs
{
  // Either a delta file (columns t, delta) or two lambda files (t, lambda).
  std::optional<std::string> delta_path;
  std::optional<std::string> lambda_a_path;
  std::optional<std::string> lambda_b_path;
};

void cmd_score(const ScoreInputs& in, double window, const std::string& out_dir, std::ostream& log);

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;

} // namespace revmekf

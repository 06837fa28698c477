/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/commands.h"

#include <CLI11.hpp>

#include <iostream>

using namespace revmekf;

namespace
{
struct Overrides
{
  std::string filter;
  std::string gamma;
  double qk{0.0};
  double uk{0.0};
  long long seed{-1};
  std::string out;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool with_filter)
{
  if (with_filter)
    cmd->add_option("--filter", o.filter, "gyro_only, mekf or rev_mekf");
  cmd->add_option("--gamma", o.gamma, "heuristic gamma (number or inf)");
  cmd->add_option("--qk", o.qk, "process noise, scalar times identity")->check(CLI::PositiveNumber);
  cmd->add_option("--uk", o.uk, "measurement noise, scalar times identity")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "trajectory seed for synthetic input")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", o.out, "output directory");
}

void apply(const Overrides& o, RunConfig& c, bool apply_filter)
{
  if (apply_filter && !o.filter.empty())
    c.filter = parse_filter_kind(o.filter);
  if (!o.gamma.empty())
    c.gamma = parse_gamma(o.gamma);
  if (o.qk > 0.0)
    c.params.process_noise = Mat6<double>::Identity() * o.qk;
  if (o.uk > 0.0)
    c.params.measurement_noise = Mat6<double>::Identity() * o.uk;
  if (o.seed >= 0 && c.synth)
  {
    c.synth->trajectory.seed = static_cast<std::uint64_t>(o.seed);
    c.synth->noise.seed = static_cast<std::uint64_t>(o.seed) + 1;
  }
  if (!o.out.empty())
    c.output_dir = o.out;
}

RunConfig base_config(const std::string& path)
{
  if (!path.empty())
    return load_run_config(path);
  RunConfig c;
  c.synth = SynthConfig{};
  return c;
}
} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"MEKF and reversible MEKF attitude estimation"};
  app.require_subcommand(1);

  std::string synth_config, synth_out = ".";
  long long synth_seed = -1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic IMU stream and its ground truth");
  synth->add_option("--config", synth_config, "synthetic trajectory config (JSON)");
  synth->add_option("--seed", synth_seed, "trajectory seed")->check(CLI::NonNegativeNumber);
  synth->add_option("--out", synth_out, "output directory");

  std::string run_config;
  Overrides run_over;
  auto* run = app.add_subcommand("run", "run one filter and write its trace");
  run->add_option("--config", run_config, "run config (JSON)");
  add_overrides(run, run_over, true);

  std::string cmp_config, cmp_config_b, cmp_filter_b;
  double cmp_window = 0.0;
  Overrides cmp_over;
  auto* compare = app.add_subcommand("compare", "score filter b against filter a on the same input");
  compare->add_option("--config", cmp_config, "run config for filter a (JSON)");
  compare->add_option("--config-b", cmp_config_b, "run config for filter b; defaults to --config");
  compare->add_option("--filter", cmp_over.filter, "filter a, default mekf");
  compare->add_option("--filter-b", cmp_filter_b, "filter b, default rev_mekf");
  compare->add_option("--window", cmp_window, "interval length in seconds")->check(CLI::PositiveNumber);
  add_overrides(compare, cmp_over, false);

  ScoreInputs score_in;
  std::string score_delta, score_la, score_lb, score_out = ".";
  double score_window = 1.0;
  auto* score = app.add_subcommand("score", "interval scores of a delta series");
  score->add_option("--delta", score_delta, "delta.csv from compare");
  score->add_option("--lambda-a", score_la, "lambda.csv of filter a");
  score->add_option("--lambda-b", score_lb, "lambda.csv of filter b");
  score->add_option("--window", score_window, "interval length in seconds")->check(CLI::PositiveNumber);
  score->add_option("--out", score_out, "output directory");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return kExitConfigError;
  }

  try
  {
    if (*synth)
    {
      SynthConfig c = synth_config.empty() ? SynthConfig{} : load_synth_config(synth_config);
      if (synth_seed >= 0)
      {
        c.trajectory.seed = static_cast<std::uint64_t>(synth_seed);
        c.noise.seed = static_cast<std::uint64_t>(synth_seed) + 1;
      }
      cmd_synth(c, synth_out, std::cout);
    }
    else if (*run)
    {
      RunConfig c = base_config(run_config);
      apply(run_over, c, true);
      c.validate();
      cmd_run(c, std::cout);
    }
    else if (*compare)
    {
      RunConfig a = base_config(cmp_config);
      RunConfig b = cmp_config_b.empty() ? a : load_run_config(cmp_config_b);
      a.filter = FilterKind::kMekf;
      if (cmp_config_b.empty() || !cmp_filter_b.empty())
        b.filter = FilterKind::kRevMekf;
      apply(cmp_over, a, true);
      apply(cmp_over, b, false);
      if (!cmp_filter_b.empty())
        b.filter = parse_filter_kind(cmp_filter_b);
      const double window = cmp_window > 0.0 ? cmp_window : a.window;
      a.validate();
      b.validate();
      cmd_compare(a, b, window, std::cout);
    }
    else if (*score)
    {
      if (!score_delta.empty())
        score_in.delta_path = score_delta;
      if (!score_la.empty())
        score_in.lambda_a_path = score_la;
      if (!score_lb.empty())
        score_in.lambda_b_path = score_lb;
      cmd_score(score_in, score_window, score_out, std::cout);
    }
  }
  catch (const ConfigError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

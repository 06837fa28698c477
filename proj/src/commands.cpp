/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/commands.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>

namespace revmekf
{

namespace
{
std::string join(const std::string& dir, const char* name)
{
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw DataError("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path + "'");
  return out;
}

// Header names of the first line, used to pick a default truth source.
bool header_has(const std::string& path, const std::string& name)
{
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line))
    return false;
  for (auto f : split_fields(line))
    if (f == name)
      return true;
  return false;
}

// Named numeric columns of a headed CSV file.
std::map<std::string, std::vector<double>> read_columns(const std::string& path,
                                                        const std::vector<std::string>& names)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("missing header row in '" + path + "'", 1);
  const auto header = split_fields(line);
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < header.size(); ++i)
    idx.emplace(std::string(header[i]), i);

  std::map<std::string, std::vector<double>> out;
  std::vector<std::size_t> cols;
  for (const auto& n : names)
  {
    const auto it = idx.find(n);
    if (it == idx.end())
      throw MissingColumn("'" + path + "' has no column '" + n + "'");
    cols.push_back(it->second);
    out[n];
  }
  std::size_t line_no = 1;
  while (std::getline(in, line))
  {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError("unexpected field count in '" + path + "'", line_no);
    for (std::size_t i = 0; i < names.size(); ++i)
      out[names[i]].push_back(parse_double(fields[cols[i]], line_no));
  }
  return out;
}

const char* choice_name(Choice c)
{
  return c == Choice::kRev ? "rev" : "mekf";
}

std::vector<double> times_of(const ImuStream& s)
{
  std::vector<double> t;
  t.reserve(s.size());
  for (const auto& x : s)
    t.push_back(x.t);
  return t;
}

char* fmt(char* buf, std::size_t n, const char* f, double v)
{
  std::snprintf(buf, n, f, v);
  return buf;
}
} // namespace

AlignedRun load_input(const RunConfig& cfg)
{
  AlignedRun run;
  if (cfg.synth)
  {
    const GroundTruth truth = generate_truth(cfg.synth->trajectory);
    run.samples = inject_noise(derive_measurements(truth, cfg.synth->trajectory), cfg.synth->noise);
    run.truth = truth_orientations(truth);
  }
  else if (cfg.input)
  {
    DatasetSpec spec;
    if (cfg.dataset)
      spec = load_dataset_spec(*cfg.dataset);
    else
      spec.gt_source = header_has(*cfg.input, "qw") ? TruthSource::kInline : TruthSource::kNone;
    run = parse_csv(*cfg.input, spec);
  }
  else
  {
    throw ConfigError("run config has no input: set 'input' or 'synth'");
  }
  if (run.samples.size() < 2)
    throw DataError("input has fewer than 2 samples");

  if (!run.truth && cfg.static_truth)
  {
    const Quaterniond q = static_ground_truth<double>(run.samples, cfg.params.gravity_ref, cfg.params.mag_ref);
    run.truth = std::vector<Quaterniond>(run.samples.size(), q);
  }
  return run;
}

RunOutcome execute_run(const RunConfig& cfg, const AlignedRun& input)
{
  RunOptions<double> opt = cfg.run_options();
  const bool have_truth = input.truth.has_value();
  if (cfg.init == InitMode::kTruth && !have_truth)
    throw ConfigError("init 'truth' requested but the input has no ground truth");
  if (have_truth && cfg.init != InitMode::kTriad)
    opt.initial_orientation = input.truth->front().normalized();

  RunOutcome out;
  out.result = run_filter<double>(input.samples, opt);
  if (have_truth)
    out.lambda = lambda_series<double>(out.result.trace, to_trace(*input.truth), out.result.t);
  return out;
}

std::string format_score_table(const ScoreTable& table)
{
  std::string s = "interval                      samples   score\n";
  char line[128];
  for (const auto& iv : table.intervals)
  {
    std::snprintf(line, sizeof(line), "%9.3fs <= t < %9.3fs %7zu  %5.1f%%\n", iv.t_start, iv.t_end,
                  iv.n_samples, iv.percentage);
    s += line;
  }
  std::snprintf(line, sizeof(line), "%-29s %7zu  %5.1f%%\n", "total", table.total.n_samples,
                table.total.percentage);
  s += line;
  return s;
}

void write_score_csv(const std::string& path, const ScoreTable& table)
{
  auto out = open_out(path);
  out << "interval,t_start,t_end,n_samples,percentage\n";
  for (std::size_t i = 0; i < table.intervals.size(); ++i)
  {
    const auto& iv = table.intervals[i];
    out << i << ',' << format_double(iv.t_start) << ',' << format_double(iv.t_end) << ',' << iv.n_samples
        << ',' << format_double(iv.percentage) << '\n';
  }
  out << "total," << format_double(table.total.t_start) << ',' << format_double(table.total.t_end) << ','
      << table.total.n_samples << ',' << format_double(table.total.percentage) << '\n';
}

void cmd_synth(const SynthConfig& cfg, const std::string& out_dir, std::ostream& log)
{
  ensure_dir(out_dir);
  const GroundTruth truth = generate_truth(cfg.trajectory);
  const ImuStream samples = inject_noise(derive_measurements(truth, cfg.trajectory), cfg.noise);
  const std::vector<Quaterniond> q = truth_orientations(truth);
  write_csv(join(out_dir, "imu.csv"), samples, &q);
  write_truth_csv(join(out_dir, "truth.csv"), truth);
  log << "wrote " << samples.size() << " samples to " << join(out_dir, "imu.csv") << " and "
      << join(out_dir, "truth.csv") << '\n';
}

void cmd_run(const RunConfig& cfg, std::ostream& log)
{
  const AlignedRun input = load_input(cfg);
  const RunOutcome run = execute_run(cfg, input);
  const RunResult<double>& r = run.result;
  ensure_dir(cfg.output_dir);

  {
    auto out = open_out(join(cfg.output_dir, "estimate.csv"));
    out << "t,qw,qx,qy,qz,rx,ry,rz,bx,by,bz\n";
    for (std::size_t k = 0; k < r.t.size(); ++k)
    {
      const Quaterniond& q = r.orientations[k];
      out << format_double(r.t[k]) << ',' << format_double(q.w) << ',' << format_double(q.x) << ','
          << format_double(q.y) << ',' << format_double(q.z);
      for (int i = 0; i < 3; ++i)
        out << ',' << format_double(r.trace[k](i));
      for (int i = 0; i < 3; ++i)
        out << ',' << format_double(r.biases[k](i));
      out << '\n';
    }
  }

  if (run.lambda)
  {
    auto out = open_out(join(cfg.output_dir, "lambda.csv"));
    out << "t,term,lambda\n";
    double prev = 0.0;
    for (std::size_t k = 0; k < run.lambda->values.size(); ++k)
    {
      const double v = run.lambda->values[k];
      out << format_double(r.t[k]) << ',' << format_double(v - prev) << ',' << format_double(v) << '\n';
      prev = v;
    }
  }

  std::size_t rev_count = 0;
  if (cfg.filter == FilterKind::kRevMekf)
  {
    auto out = open_out(join(cfg.output_dir, "decisions.csv"));
    out << "k,t,choice,dist_rev,dist_default,roots\n";
    for (std::size_t k = 1; k < r.decisions.size(); ++k)
    {
      const auto& d = r.decisions[k];
      rev_count += d.chosen == Choice::kRev;
      out << k << ',' << format_double(r.t[k]) << ',' << choice_name(d.chosen) << ','
          << format_double(d.dist_rev) << ',' << format_double(d.dist_default) << ',' << d.roots_found
          << '\n';
    }
  }

  log << to_string(cfg.filter) << ": " << input.samples.size() << " samples";
  if (run.lambda)
    log << ", final lambda " << format_double(run.lambda->final_value());
  if (cfg.filter == FilterKind::kRevMekf)
    log << ", rev decisions " << rev_count << '/' << (r.decisions.size() - 1);
  log << '\n';
}

void cmd_compare(const RunConfig& a, const RunConfig& b, double window, std::ostream& log, bool concurrent)
{
  const AlignedRun input = load_input(a);
  if (b.input || b.synth)
  {
    const AlignedRun other = load_input(b);
    if (times_of(other.samples) != times_of(input.samples))
      throw TraceMismatch("compare: the two configs read different sample streams");
  }
  if (!input.truth)
    throw DataError("compare: input has no ground truth to score against");

  RunOutcome ra, rb;
  if (concurrent)
  {
    auto fa = std::async(std::launch::async, [&] { return execute_run(a, input); });
    rb = execute_run(b, input);
    ra = fa.get();
  }
  else
  {
    ra = execute_run(a, input);
    rb = execute_run(b, input);
  }

  const std::vector<double> delta = delta_series<double>(*ra.lambda, *rb.lambda);
  const std::vector<double>& t = ra.result.t;
  const ScoreTable table = interval_scores(delta, t, window);

  ensure_dir(a.output_dir);
  {
    auto out = open_out(join(a.output_dir, "delta.csv"));
    out << "t,lambda_a,lambda_b,delta\n";
    for (std::size_t k = 0; k < delta.size(); ++k)
      out << format_double(t[k]) << ',' << format_double(ra.lambda->values[k]) << ','
          << format_double(rb.lambda->values[k]) << ',' << format_double(delta[k]) << '\n';
  }
  write_score_csv(join(a.output_dir, "scores.csv"), table);

  char buf[64];
  log << to_string(a.filter) << " vs " << to_string(b.filter) << ", window " << fmt(buf, sizeof(buf), "%g", window)
      << " s\n"
      << format_score_table(table);
}

void cmd_score(const ScoreInputs& in, double window, const std::string& out_dir, std::ostream& log)
{
  std::vector<double> t, delta;
  if (in.delta_path)
  {
    auto cols = read_columns(*in.delta_path, {"t", "delta"});
    t = std::move(cols["t"]);
    delta = std::move(cols["delta"]);
  }
  else if (in.lambda_a_path && in.lambda_b_path)
  {
    auto ca = read_columns(*in.lambda_a_path, {"t", "lambda"});
    auto cb = read_columns(*in.lambda_b_path, {"t", "lambda"});
    if (ca["t"] != cb["t"])
      throw TraceMismatch("score: lambda files have different time axes");
    MetricSeries<double> la{ca["lambda"], ca["t"]};
    MetricSeries<double> lb{cb["lambda"], cb["t"]};
    delta = delta_series<double>(la, lb);
    t = std::move(ca["t"]);
  }
  else
  {
    throw ConfigError("score needs --delta or both --lambda-a and --lambda-b");
  }
  const ScoreTable table = interval_scores(delta, t, window);
  ensure_dir(out_dir);
  write_score_csv(join(out_dir, "scores.csv"), table);
  log << format_score_table(table);
}

} // namespace revmekf

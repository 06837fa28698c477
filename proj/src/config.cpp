/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/config.h"

#include "revmekf/ingest.h"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace revmekf
{

using nlohmann::json;

FilterKind parse_filter_kind(const std::string& name)
{
  if (name == "gyro_only")
    return FilterKind::kGyroOnly;
  if (name == "mekf")
    return FilterKind::kMekf;
  if (name == "rev_mekf")
    return FilterKind::kRevMekf;
  throw ConfigError("unknown filter '" + name + "' (expected gyro_only, mekf or rev_mekf)");
}

std::string to_string(FilterKind kind)
{
  switch (kind)
  {
    case FilterKind::kGyroOnly:
      return "gyro_only";
    case FilterKind::kMekf:
      return "mekf";
    case FilterKind::kRevMekf:
      return "rev_mekf";
  }
  return "unknown";
}

double parse_gamma(std::string_view text)
{
  if (text == "inf" || text == "+inf" || text == "infinity")
    return std::numeric_limits<double>::infinity();
  double v = 0.0;
  try
  {
    v = parse_double(text, 0);
  }
  catch (const ParseError&)
  {
    throw ConfigError("gamma must be a number or 'inf', got '" + std::string(text) + "'");
  }
  if (!(v >= 0.0))
    throw ConfigError("gamma must be nonnegative");
  return v;
}

namespace
{
std::string read_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, const char* what)
{
  try
  {
    json j = json::parse(text.begin(), text.end());
    if (!j.is_object())
      throw ConfigError(std::string(what) + " must be a JSON object");
    return j;
  }
  catch (const json::exception& e)
  {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

Vec3d vec3(const json& j, const char* key)
{
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(std::string(key) + " must be an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::string resolve(const std::string& base_dir, const std::string& p)
{
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty())
    path = std::filesystem::path(base_dir) / path;
  return path.string();
}

double positive(const json& j, const char* key)
{
  const double v = j.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string(key) + " must be positive");
  return v;
}

SynthConfig synth_from(const json& j)
{
  SynthConfig c;
  TrajectoryConfig& t = c.trajectory;
  if (j.contains("n_samples"))
  {
    const auto n = j.at("n_samples").get<long long>();
    if (n < 2)
      throw ConfigError("n_samples must be at least 2");
    t.n_samples = static_cast<std::size_t>(n);
  }
  if (j.contains("dt"))
    t.dt = positive(j, "dt");
  if (j.contains("normal"))
  {
    // Normalized here; the trajectory invariant is on the stored unit vector.
    const Vec3d n = vec3(j, "normal");
    if (!(n.norm() > 0.0))
      throw ConfigError("normal must be nonzero");
    t.normal = n.normalized();
  }
  if (j.contains("seed"))
    t.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("accel_scale"))
    t.accel_scale = j.at("accel_scale").get<double>();
  if (j.contains("gravity_mag"))
    t.gravity_mag = positive(j, "gravity_mag");
  if (j.contains("mag_field"))
    t.mag_field = vec3(j, "mag_field");

  c.noise.seed = t.seed + 1;
  if (j.contains("noise"))
  {
    const json& n = j.at("noise");
    if (n.contains("gyro_noise_std"))
      c.noise.gyro_noise_std = n.at("gyro_noise_std").get<double>();
    if (n.contains("gyro_bias"))
      c.noise.gyro_bias = vec3(n, "gyro_bias");
    if (n.contains("accel_noise_std"))
      c.noise.accel_noise_std = n.at("accel_noise_std").get<double>();
    if (n.contains("mag_noise_std"))
      c.noise.mag_noise_std = n.at("mag_noise_std").get<double>();
    if (n.contains("seed"))
      c.noise.seed = n.at("seed").get<std::uint64_t>();
  }
  t.validate();
  c.noise.validate();
  return c;
}
} // namespace

SynthConfig synth_config_from_json(std::string_view text)
{
  const json j = parse_json(text, "synth config");
  try
  {
    return synth_from(j.contains("synth") ? j.at("synth") : j);
  }
  catch (const json::exception& e)
  {
    throw ConfigError(std::string("synth config: ") + e.what());
  }
}

SynthConfig load_synth_config(const std::string& path)
{
  return synth_config_from_json(read_file(path));
}

Mat6<double> load_matrix6(const std::string& path)
{
  std::string text = read_file(path);
  for (char& c : text)
    if (c == ',' || c == ';')
      c = ' ';
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token)
  {
    try
    {
      values.push_back(parse_double(token, 0));
    }
    catch (const ParseError&)
    {
      throw ConfigError("matrix file '" + path + "': bad number '" + token + "'");
    }
  }
  if (values.size() != 36)
    throw ConfigError("matrix file '" + path + "' must hold 36 numbers, found "
                      + std::to_string(values.size()));
  Mat6<double> m;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      m(r, c) = values[static_cast<std::size_t>(r * 6 + c)];
  return m;
}

RunConfig run_config_from_json(std::string_view text, const std::string& base_dir)
{
  const json j = parse_json(text, "run config");
  RunConfig c;
  try
  {
    if (j.contains("synth"))
    {
      c.synth = synth_from(j.at("synth"));
      // References and plane default to the generator's.
      c.params.gravity_ref = c.synth->trajectory.gravity_ref();
      c.params.mag_ref = c.synth->trajectory.mag_field;
      c.normal = c.synth->trajectory.normal;
    }
    if (j.contains("filter"))
      c.filter = parse_filter_kind(j.at("filter").get<std::string>());
    if (j.contains("qk"))
      c.params.process_noise = Mat6<double>::Identity() * positive(j, "qk");
    if (j.contains("uk"))
      c.params.measurement_noise = Mat6<double>::Identity() * positive(j, "uk");
    if (j.contains("qk_file"))
      c.params.process_noise = load_matrix6(resolve(base_dir, j.at("qk_file").get<std::string>()));
    if (j.contains("uk_file"))
      c.params.measurement_noise = load_matrix6(resolve(base_dir, j.at("uk_file").get<std::string>()));
    if (j.contains("gamma"))
    {
      const json& g = j.at("gamma");
      c.gamma = g.is_string() ? parse_gamma(g.get<std::string>()) : g.get<double>();
    }
    if (j.contains("use_predicted_mag_ref"))
      c.use_predicted_mag_ref = j.at("use_predicted_mag_ref").get<bool>();
    if (j.contains("normal"))
      c.normal = vec3(j, "normal");
    if (j.contains("g_ref"))
      c.params.gravity_ref = vec3(j, "g_ref");
    if (j.contains("b_ref"))
      c.params.mag_ref = vec3(j, "b_ref");
    if (j.contains("residual_mode"))
    {
      const auto m = j.at("residual_mode").get<std::string>();
      if (m == "subtractive")
        c.params.residual_mode = ResidualMode::kSubtractive;
      else if (m == "multiplicative")
        c.params.residual_mode = ResidualMode::kMultiplicative;
      else
        throw ConfigError("unknown residual_mode '" + m + "'");
    }
    if (j.contains("phi_order"))
      c.params.phi_order = j.at("phi_order").get<int>();
    if (j.contains("p0"))
      c.p0 = positive(j, "p0");
    if (j.contains("init"))
    {
      const auto m = j.at("init").get<std::string>();
      if (m == "auto")
        c.init = InitMode::kAuto;
      else if (m == "truth")
        c.init = InitMode::kTruth;
      else if (m == "triad")
        c.init = InitMode::kTriad;
      else
        throw ConfigError("unknown init '" + m + "'");
    }
    if (j.contains("input"))
      c.input = resolve(base_dir, j.at("input").get<std::string>());
    if (j.contains("dataset"))
      c.dataset = resolve(base_dir, j.at("dataset").get<std::string>());
    if (j.contains("static_truth"))
      c.static_truth = j.at("static_truth").get<bool>();
    if (j.contains("output_dir"))
      c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    if (j.contains("window"))
      c.window = positive(j, "window");
  }
  catch (const json::exception& e)
  {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path)
{
  return run_config_from_json(read_file(path), std::filesystem::path(path).parent_path().string());
}

void RunConfig::validate() const
{
  if (input && synth)
    throw ConfigError("run config: give either input or synth, not both");
  if (input && !std::filesystem::exists(*input))
    throw ConfigError("input file '" + *input + "' does not exist");
  if (dataset && !std::filesystem::exists(*dataset))
    throw ConfigError("dataset spec '" + *dataset + "' does not exist");
  if (!(normal.norm() > 0.0))
    throw ConfigError("plane normal must be nonzero");
  if (!(gamma >= 0.0))
    throw ConfigError("gamma must be nonnegative");
  if (params.phi_order != 1 && params.phi_order != 2)
    throw ConfigError("phi_order must be 1 or 2");
  if (!(params.gravity_ref.norm() > 0.0) || !(params.mag_ref.norm() > 0.0))
    throw ConfigError("reference vectors must be nonzero");
  if (!(window > 0.0))
    throw ConfigError("window must be positive");
}

RunOptions<double> RunConfig::run_options() const
{
  RunOptions<double> opt;
  opt.kind = filter;
  opt.params = params;
  opt.heuristic.gamma = gamma;
  opt.heuristic.use_predicted_mag_ref = use_predicted_mag_ref;
  opt.heuristic.constraint = PlaneConstraint<double>::make(normal, params.gravity_ref, params.mag_ref);
  opt.initial_covariance = p0;
  return opt;
}

} // namespace revmekf

/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/ingest.h"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace revmekf
{

namespace
{
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

bool is_blank(char c)
{
  return c == ' ' || c == '\t' || c == '\r';
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && is_blank(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back()))
    s.remove_suffix(1);
  return s;
}

GyroUnit parse_gyro_unit(const std::string& s)
{
  if (s == "rad/s")
    return GyroUnit::kRadPerSec;
  if (s == "deg/s")
    return GyroUnit::kDegPerSec;
  throw ConfigError("unknown gyro_unit '" + s + "'");
}

AccelUnit parse_accel_unit(const std::string& s)
{
  if (s == "m/s^2" || s == "m/s\xC2\xB2" || s == "m/s2")
    return AccelUnit::kMetersPerSec2;
  if (s == "g")
    return AccelUnit::kStandardGravity;
  throw ConfigError("unknown accel_unit '" + s + "'");
}

TruthSource parse_truth_source(const std::string& s)
{
  if (s == "inline")
    return TruthSource::kInline;
  if (s == "separate_file")
    return TruthSource::kSeparateFile;
  if (s == "none")
    return TruthSource::kNone;
  throw ConfigError("unknown gt_source '" + s + "'");
}

std::map<std::string, std::size_t> index_header(std::string_view header)
{
  std::map<std::string, std::size_t> idx;
  const auto fields = split_fields(header);
  for (std::size_t i = 0; i < fields.size(); ++i)
    idx.emplace(std::string(fields[i]), i);
  return idx;
}

std::size_t require_column(const std::map<std::string, std::size_t>& idx, const std::string& name)
{
  const auto it = idx.find(name);
  if (it == idx.end())
    throw MissingColumn("missing column '" + name + "'");
  return it->second;
}

struct TruthTable
{
  std::vector<double> t;
  std::vector<Quaterniond> q;
};

TruthTable parse_truth_file(const std::string& path, const DatasetSpec& spec)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open truth file '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("empty truth file '" + path + "'", 1);
  const auto idx = index_header(line);
  const std::size_t ct = require_column(idx, spec.column("t"));
  std::vector<std::size_t> cq;
  for (const auto& name : quaternion_columns())
    cq.push_back(require_column(idx, spec.column(name)));

  TruthTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line))
  {
    ++line_no;
    if (trim(line).empty())
      continue;
    const auto fields = split_fields(line);
    if (fields.size() != idx.size())
      throw ParseError("truth row has " + std::to_string(fields.size()) + " fields, expected "
                           + std::to_string(idx.size()),
                       line_no);
    const double t = parse_double(fields[ct], line_no);
    if (!table.t.empty() && !(t > table.t.back()))
      throw NonMonotonicTime("truth timestamps are not strictly increasing", line_no);
    table.t.push_back(t);
    table.q.emplace_back(parse_double(fields[cq[0]], line_no),
                         parse_double(fields[cq[1]], line_no),
                         parse_double(fields[cq[2]], line_no),
                         parse_double(fields[cq[3]], line_no));
  }
  return table;
}

// Applies the body axis permutation to a truth orientation. A reflection has no
// rotation equivalent, so truth is then left in the source convention.
Quaterniond permute_orientation(const Quaterniond& q, const Mat3d& perm)
{
  if (perm.determinant() < 0.0)
    return q;
  return from_rotation_matrix<double>(to_rotation_matrix(q.normalized()) * perm.transpose());
}
} // namespace

const std::vector<std::string>& imu_columns()
{
  static const std::vector<std::string> names{"t", "gx", "gy", "gz", "ax", "ay", "az", "mx", "my", "mz"};
  return names;
}

const std::vector<std::string>& quaternion_columns()
{
  static const std::vector<std::string> names{"qw", "qx", "qy", "qz"};
  return names;
}

std::string DatasetSpec::column(const std::string& canonical) const
{
  const auto it = column_map.find(canonical);
  return it == column_map.end() ? canonical : it->second;
}

void DatasetSpec::validate() const
{
  for (int r = 0; r < 3; ++r)
  {
    int nonzero_row = 0;
    int nonzero_col = 0;
    for (int c = 0; c < 3; ++c)
    {
      const double v = axis_permutation(r, c);
      if (v != 0.0 && v != 1.0 && v != -1.0)
        throw ConfigError("axis_permutation entries must be -1, 0 or 1");
      nonzero_row += v != 0.0;
      nonzero_col += axis_permutation(c, r) != 0.0;
    }
    if (nonzero_row != 1 || nonzero_col != 1)
      throw ConfigError("axis_permutation must be a signed permutation matrix");
  }
  if (gt_source == TruthSource::kSeparateFile && gt_path.empty())
    throw ConfigError("gt_source separate_file requires gt_path");
}

DatasetSpec dataset_spec_from_json(std::string_view text, const std::string& base_dir)
{
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(text.begin(), text.end());
  }
  catch (const nlohmann::json::exception& e)
  {
    throw ConfigError(std::string("dataset spec: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("dataset spec must be a JSON object");

  DatasetSpec spec;
  spec.base_dir = base_dir;
  try
  {
    if (j.contains("column_map"))
      for (const auto& [key, value] : j.at("column_map").items())
        spec.column_map[key] = value.get<std::string>();
    if (j.contains("gyro_unit"))
      spec.gyro_unit = parse_gyro_unit(j.at("gyro_unit").get<std::string>());
    if (j.contains("accel_unit"))
      spec.accel_unit = parse_accel_unit(j.at("accel_unit").get<std::string>());
    if (j.contains("mag_normalize"))
      spec.mag_normalize = j.at("mag_normalize").get<bool>();
    if (j.contains("axis_permutation"))
    {
      const auto& m = j.at("axis_permutation");
      if (!m.is_array() || m.size() != 3)
        throw ConfigError("axis_permutation must be a 3x3 array");
      for (int r = 0; r < 3; ++r)
      {
        if (!m[r].is_array() || m[r].size() != 3)
          throw ConfigError("axis_permutation must be a 3x3 array");
        for (int c = 0; c < 3; ++c)
          spec.axis_permutation(r, c) = m[r][c].get<double>();
      }
    }
    if (j.contains("gt_source"))
      spec.gt_source = parse_truth_source(j.at("gt_source").get<std::string>());
    if (j.contains("gt_path"))
      spec.gt_path = j.at("gt_path").get<std::string>();
  }
  catch (const nlohmann::json::exception& e)
  {
    throw ConfigError(std::string("dataset spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

DatasetSpec load_dataset_spec(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open dataset spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return dataset_spec_from_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true)
  {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos)
    {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line)
{
  double v = 0.0;
  const char* end = field.data() + field.size();
  // from_chars rejects a leading '+', which some loggers emit.
  const char* begin = field.data();
  if (begin != end && *begin == '+')
    ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || field.empty())
    throw ParseError("cannot parse number '" + std::string(field) + "'", line);
  if (!std::isfinite(v))
    throw ParseError("non-finite value '" + std::string(field) + "'", line);
  return v;
}

AlignedRun parse_csv(std::istream& in, const DatasetSpec& spec)
{
  spec.validate();
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("missing header row", 1);
  const auto idx = index_header(line);

  std::vector<std::size_t> cols;
  for (const auto& name : imu_columns())
    cols.push_back(require_column(idx, spec.column(name)));
  const bool inline_truth = spec.gt_source == TruthSource::kInline;
  std::vector<std::size_t> qcols;
  if (inline_truth)
    for (const auto& name : quaternion_columns())
      qcols.push_back(require_column(idx, spec.column(name)));

  const bool permute = spec.axis_permutation != Mat3d::Identity();
  const double gyro_scale = spec.gyro_unit == GyroUnit::kDegPerSec ? kDegToRad : 1.0;
  const double accel_scale = spec.accel_unit == AccelUnit::kStandardGravity ? kStandardGravity : 1.0;

  AlignedRun run;
  std::vector<Quaterniond> truth;
  std::size_t line_no = 1;
  while (std::getline(in, line))
  {
    ++line_no;
    if (trim(line).empty())
      continue;
    const auto fields = split_fields(line);
    if (fields.size() != idx.size())
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected "
                           + std::to_string(idx.size()),
                       line_no);
    double v[10];
    for (std::size_t i = 0; i < 10; ++i)
      v[i] = parse_double(fields[cols[i]], line_no);

    ImuSample s;
    s.t = v[0];
    if (!run.samples.empty() && !(s.t > run.samples.back().t))
      throw NonMonotonicTime("timestamps are not strictly increasing", line_no);
    s.omega = Vec3d(v[1], v[2], v[3]);
    s.accel = Vec3d(v[4], v[5], v[6]);
    s.mag = Vec3d(v[7], v[8], v[9]);
    // Scaling by exactly 1 and the identity permutation are skipped so that
    // signed zeros survive a round trip.
    if (gyro_scale != 1.0)
      s.omega *= gyro_scale;
    if (accel_scale != 1.0)
      s.accel *= accel_scale;
    if (permute)
    {
      s.omega = spec.axis_permutation * s.omega;
      s.accel = spec.axis_permutation * s.accel;
      s.mag = spec.axis_permutation * s.mag;
    }
    if (spec.mag_normalize)
    {
      const double n = s.mag.norm();
      if (!(n > 0.0))
        throw ParseError("zero magnetometer vector cannot be normalized", line_no);
      s.mag /= n;
    }
    run.samples.push_back(s);

    if (inline_truth)
    {
      Quaterniond q(parse_double(fields[qcols[0]], line_no),
                    parse_double(fields[qcols[1]], line_no),
                    parse_double(fields[qcols[2]], line_no),
                    parse_double(fields[qcols[3]], line_no));
      truth.push_back(permute ? permute_orientation(q, spec.axis_permutation) : q);
    }
  }

  if (inline_truth)
  {
    run.truth = std::move(truth);
  }
  else if (spec.gt_source == TruthSource::kSeparateFile)
  {
    std::filesystem::path p(spec.gt_path);
    if (p.is_relative() && !spec.base_dir.empty())
      p = std::filesystem::path(spec.base_dir) / p;
    TruthTable table = parse_truth_file(p.string(), spec);
    if (permute)
      for (auto& q : table.q)
        q = permute_orientation(q, spec.axis_permutation);
    std::vector<double> times;
    times.reserve(run.samples.size());
    for (const auto& s : run.samples)
      times.push_back(s.t);
    run.truth = resample_truth(table.t, table.q, times);
  }
  return run;
}

AlignedRun parse_csv(const std::string& path, const DatasetSpec& spec)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open '" + path + "'");
  return parse_csv(in, spec);
}

void write_csv(std::ostream& out, const ImuStream& samples, const std::vector<Quaterniond>* truth)
{
  if (truth && truth->size() != samples.size())
    throw TraceMismatch("write_csv: truth length differs from the sample count");
  out << "t,gx,gy,gz,ax,ay,az,mx,my,mz";
  if (truth)
    out << ",qw,qx,qy,qz";
  out << '\n';
  for (std::size_t k = 0; k < samples.size(); ++k)
  {
    const ImuSample& s = samples[k];
    out << format_double(s.t);
    for (const Vec3d* v : {&s.omega, &s.accel, &s.mag})
      for (int i = 0; i < 3; ++i)
        out << ',' << format_double((*v)(i));
    if (truth)
    {
      const Quaterniond& q = (*truth)[k];
      out << ',' << format_double(q.w) << ',' << format_double(q.x) << ',' << format_double(q.y) << ','
          << format_double(q.z);
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const ImuStream& samples, const std::vector<Quaterniond>* truth)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path + "'");
  write_csv(out, samples, truth);
}

void write_truth_csv(const std::string& path, const GroundTruth& truth)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path + "'");
  out << "t,qw,qx,qy,qz,px,py,pz,vx,vy,vz\n";
  for (const auto& s : truth)
  {
    out << format_double(s.t) << ',' << format_double(s.q.w) << ',' << format_double(s.q.x) << ','
        << format_double(s.q.y) << ',' << format_double(s.q.z);
    for (const Vec3d* v : {&s.p, &s.v})
      for (int i = 0; i < 3; ++i)
        out << ',' << format_double((*v)(i));
    out << '\n';
  }
}

std::vector<Quaterniond> resample_truth(const std::vector<double>& truth_times,
                                        const std::vector<Quaterniond>& truth_quats,
                                        const std::vector<double>& sample_times)
{
  if (truth_times.size() != truth_quats.size())
    throw TraceMismatch("resample_truth: times and quaternions differ in length");
  if (truth_times.size() < 2)
    throw DataError("resample_truth: need at least 2 truth samples");
  for (std::size_t i = 1; i < truth_times.size(); ++i)
    if (!(truth_times[i] > truth_times[i - 1]))
      throw DataError("resample_truth: truth times must be strictly increasing");

  // Sign-continuous copy of the truth so every segment takes the short arc.
  // Inputs already unit to rounding are kept bit-exact.
  const auto unit = [](const Quaterniond& x) {
    return std::abs(x.squared_norm() - 1.0) > 1e-14 ? x.normalized() : x;
  };
  std::vector<Quaterniond> q(truth_quats.size());
  q[0] = unit(truth_quats[0]);
  for (std::size_t i = 1; i < q.size(); ++i)
  {
    q[i] = unit(truth_quats[i]);
    if (q[i].coeffs().dot(q[i - 1].coeffs()) < 0.0)
      q[i] = -q[i];
  }

  const std::size_t last = truth_times.size() - 1;
  const double first_period = truth_times[1] - truth_times[0];
  const double last_period = truth_times[last] - truth_times[last - 1];

  std::vector<Quaterniond> out;
  out.reserve(sample_times.size());
  for (double t : sample_times)
  {
    if (t < truth_times.front() - first_period || t > truth_times.back() + last_period)
      throw CoverageGap("resample_truth: sample at t=" + format_double(t) + " is outside the truth span");

    std::size_t i;
    if (t <= truth_times.front())
      i = 0;
    else if (t >= truth_times.back())
      i = last - 1;
    else
      i = static_cast<std::size_t>(std::upper_bound(truth_times.begin(), truth_times.end(), t)
                                   - truth_times.begin())
          - 1;

    Quaterniond r;
    if (t == truth_times[i])
      r = q[i];
    else if (t == truth_times[i + 1])
      r = q[i + 1];
    else
    {
      const double s = (t - truth_times[i]) / (truth_times[i + 1] - truth_times[i]);
      const Vec3d step = quat_log((q[i].conjugate() * q[i + 1]).normalized());
      r = (q[i] * quat_exp<double>(Vec3d(step * s))).normalized();
    }
    if (!out.empty() && r.coeffs().dot(out.back().coeffs()) < 0.0)
      r = -r;
    out.push_back(r);
  }
  return out;
}

} // namespace revmekf

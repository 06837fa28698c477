/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/metric.h"

#include <cmath>

namespace revmekf
{

namespace
{
IntervalScore score_range(const std::vector<double>& delta,
                          std::size_t begin,
                          std::size_t end,
                          double t_start,
                          double t_end)
{
  IntervalScore s;
  s.t_start = t_start;
  s.t_end = t_end;
  s.n_samples = end - begin;
  if (s.n_samples < 2)
    return s;
  std::size_t up = 0;
  for (std::size_t k = begin + 1; k < end; ++k)
    if (delta[k] > delta[k - 1])
      ++up;
  s.percentage = 100.0 * static_cast<double>(up) / static_cast<double>(s.n_samples - 1);
  return s;
}
} // namespace

ScoreTable interval_scores(const std::vector<double>& delta, const std::vector<double>& t, double window)
{
  if (!(window > 0.0))
    throw ConfigError("interval_scores: window must be positive");
  if (delta.size() != t.size())
    throw TraceMismatch("interval_scores: delta and time axis lengths differ");

  ScoreTable table;
  if (delta.empty())
    return table;

  const double t0 = t.front();
  std::size_t begin = 0;
  while (begin < t.size())
  {
    const auto index = static_cast<long long>(std::floor((t[begin] - t0) / window));
    const double w_start = t0 + static_cast<double>(index) * window;
    const double w_end = w_start + window;
    std::size_t end = begin;
    while (end < t.size() && t[end] < w_end)
      ++end;
    if (end == begin)
      ++end;  // guards against rounding at the window edge
    table.intervals.push_back(score_range(delta, begin, end, w_start, std::min(w_end, t[end - 1])));
    table.intervals.back().t_end = w_end;
    begin = end;
  }
  // Final partial window ends at the last sample.
  table.intervals.back().t_end = std::min(table.intervals.back().t_end, t.back());
  table.total = score_range(delta, 0, delta.size(), t0, t.back());
  return table;
}

} // namespace revmekf

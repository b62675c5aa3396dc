#include "gctl/metrics.hpp"

#include "gctl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gctl {

double rmse(std::span<const TraceRow> rows) {
  if (rows.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& r : rows) acc += r.e * r.e;
  return std::sqrt(acc / static_cast<double>(rows.size()));
}

namespace {

std::vector<std::size_t> segment_starts(std::span<const TraceRow> rows) {
  double lo = rows.front().ref, hi = rows.front().ref;
  for (const auto& r : rows) {
    lo = std::min(lo, r.ref);
    hi = std::max(hi, r.ref);
  }
  const double jump = 0.25 * (hi - lo);
  std::vector<std::size_t> starts{0};
  if (jump <= 0.0) return starts;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::abs(rows[i].ref - rows[i - 1].ref) > jump) starts.push_back(i);
  return starts;
}

SegmentMetrics measure(std::span<const TraceRow> rows, std::size_t begin, std::size_t end) {
  SegmentMetrics m;
  m.begin = begin;
  m.end = end;
  m.start_time = rows[begin].t;
  m.from_level = begin == 0 ? rows[0].y : rows[begin - 1].ref;
  m.to_level = rows[end - 1].ref;
  for (std::size_t i = begin; i < end; ++i)
    m.amplitude = std::max(m.amplitude, std::abs(rows[i].ref - m.from_level));

  const double step = m.to_level - m.from_level;
  if (std::abs(step) > 1e-9) {
    const double dir = step > 0.0 ? 1.0 : -1.0;
    const double lo = m.from_level + kRiseLow * step;
    const double hi = m.from_level + kRiseHigh * step;
    std::optional<double> t10, t90;
    for (std::size_t i = begin; i < end && !t90; ++i) {
      if (!t10 && dir * (rows[i].y - lo) >= 0.0) t10 = rows[i].t;
      if (dir * (rows[i].y - hi) >= 0.0) t90 = rows[i].t;
    }
    if (t10 && t90) m.rise_time = *t90 - *t10;
  }

  if (m.amplitude > 1e-9) {
    const double band = kSettleBand * m.amplitude;
    std::size_t first_inside = end;
    for (std::size_t i = end; i-- > begin;) {
      if (std::abs(rows[i].e) > band) break;
      first_inside = i;
    }
    if (first_inside < end) m.settling_time = rows[first_inside].t - m.start_time;
  }
  return m;
}

}  // namespace

std::vector<SegmentMetrics> segment_metrics(std::span<const TraceRow> rows) {
  std::vector<SegmentMetrics> out;
  if (rows.empty()) return out;
  auto starts = segment_starts(rows);
  starts.push_back(rows.size());
  for (std::size_t s = 0; s + 1 < starts.size(); ++s)
    out.push_back(measure(rows, starts[s], starts[s + 1]));
  return out;
}

Summary metrics(std::span<const TraceRow> rows) {
  if (rows.size() < 2) throw ContractViolation("metrics: need at least two rows");
  Summary s;
  s.rmse = rmse(rows);
  for (const auto& r : rows) s.max_abs_u = std::max(s.max_abs_u, std::abs(r.u));
  s.final_rule_count = rows.back().rules;
  s.segments = segment_metrics(rows);

  const SegmentMetrics* primary = &s.segments.front();
  double best = std::abs(primary->to_level - primary->from_level);
  for (const auto& seg : s.segments) {
    const double mag = std::abs(seg.to_level - seg.from_level);
    if (mag > best) {
      best = mag;
      primary = &seg;
    }
  }
  s.rise_time_s = primary->rise_time;
  s.settling_time_s = primary->settling_time;
  s.step_time_s = primary->start_time;
  return s;
}

}  // namespace gctl

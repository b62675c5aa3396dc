#pragma once

#include "gctl/trace.hpp"

#include <span>
#include <vector>

namespace gctl {

inline constexpr double kRiseLow = 0.10;
inline constexpr double kRiseHigh = 0.90;
inline constexpr double kSettleBand = 0.02;

double rmse(std::span<const TraceRow> rows);

// Splits the run where the reference jumps by more than a quarter of its
// overall range and measures rise (10-90%) and 2%-band settling per segment.
std::vector<SegmentMetrics> segment_metrics(std::span<const TraceRow> rows);

// Summary over the whole trace; rise/settling are those of the segment with
// the largest commanded step. Requires at least two rows.
Summary metrics(std::span<const TraceRow> rows);

}  // namespace gctl

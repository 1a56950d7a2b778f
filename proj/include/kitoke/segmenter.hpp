#pragma once

#include "kitoke/config.hpp"
#include "kitoke/parallel.hpp"
#include "kitoke/tensor.hpp"

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

namespace kitoke {

// Per-transition signals. Entry k describes the step from frame k to frame
// k + 1 (0-based frames), so every array has T - 1 entries.
struct DiffTrace {
    std::vector<double> diff_pos;   // mean |v[t][i] - v[t-1][i]|
    std::vector<double> diff_match; // mean min_j |v[t-1][i] - v[t][j]|
    std::vector<double> diff_total; // diff_pos + diff_match
    std::vector<double> dev;        // max rise over the neighbouring diffs
    std::vector<double> dev_rel;    // same rise relative to the neighbour

    std::size_t size() const noexcept { return diff_total.size(); }
    std::size_t frames() const noexcept { return diff_total.size() + 1; }
};

// Denominator floor for relative deviations.
inline constexpr double relative_deviation_floor = 1e-9;

// Fills diff_pos / diff_match / diff_total; dev and dev_rel are left empty.
// Nearest neighbours are exact. Errors: invalid_argument when T < 2.
DiffTrace frame_diff(const TensorView& tokens, const ExecOptions& exec = {});

struct Deviations {
    std::vector<double> dev;
    std::vector<double> dev_rel;
};

// Deviation of each diff from its temporal neighbours. At either end of the
// range only the existing neighbour is used; a lone value has deviation 0.
Deviations deviations(std::span<const double> diff_total);

// frame_diff followed by deviations. T = 1 yields an empty trace.
DiffTrace compute_trace(const TensorView& tokens, const ExecOptions& exec = {});

struct Interval {
    std::size_t start = 0; // first frame, 0-based
    std::size_t end = 0;   // last frame, inclusive

    std::size_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Partition of frames [0, T) into contiguous intervals.
struct IntervalSet {
    std::size_t frames = 0;
    std::vector<std::size_t> boundaries; // frames (>= 1) that open a new interval
    std::vector<Interval> intervals;

    static IntervalSet from_boundaries(std::vector<std::size_t> boundaries, std::size_t frames);
    static IntervalSet single(std::size_t frames) { return from_boundaries({}, frames); }

    std::size_t interval_of(std::size_t frame) const;
    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;
};

// True when transition k (into frame k + 1) opens a new interval:
// diff > tau_diff, or dev > tau_dev and dev_rel > tau_rel.
bool is_boundary(const DiffTrace& trace, std::size_t k, const RetentionConfig& cfg);
IntervalSet detect_boundaries(const DiffTrace& trace, const RetentionConfig& cfg);

// Threshold suggestions: the given percentile (linear interpolation) of each
// signal pooled over every transition of every trace, times `margin`.
struct ThresholdSuggestion {
    double tau_diff = 0.0;
    double tau_dev = 0.0;
    double tau_rel = 0.0;
    std::size_t n_traces = 0;
    std::size_t n_values = 0;
};

double percentile(std::vector<double> values, double pct);
ThresholdSuggestion suggest_thresholds(std::span<const DiffTrace> traces, double pct, double margin = 1.0);

// CSV columns: t, diff_pos, diff_match, diff_total, dev, dev_rel, is_boundary.
// t is the 0-based index of the frame the transition enters.
void write_trace_csv(std::ostream& out, const DiffTrace& trace, const RetentionConfig& cfg);

} // namespace kitoke

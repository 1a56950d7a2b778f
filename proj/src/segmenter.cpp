#include "kitoke/segmenter.hpp"

#include "kitoke/error.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

namespace kitoke {

DiffTrace frame_diff(const TensorView& tokens, const ExecOptions& exec) {
    const std::size_t frames = tokens.frames();
    if (frames < 2)
        fail(ErrorKind::invalid_argument, "frame differences need at least two frames");
    check_finite(tokens);
    const std::size_t m = tokens.tokens_per_frame();
    const std::size_t dims = tokens.dims();
    const auto x = detail::widen(tokens);
    std::vector<double> norms(tokens.tokens());
    for (std::size_t i = 0; i < norms.size(); ++i) norms[i] = detail::squared_norm_sequential(tokens.token(i));
    const double rel_bound = detail::reduction_error_bound(dims);

    DiffTrace trace;
    trace.diff_pos.resize(frames - 1);
    trace.diff_match.resize(frames - 1);
    trace.diff_total.resize(frames - 1);

    parallel_for(frames - 1, resolve_threads(exec), [&](std::size_t k) {
        const std::size_t prev = k * m;
        const std::size_t cur = (k + 1) * m;
        std::vector<double> g(m * m);
        detail::gram(x.row(prev), m, x.row(cur), m, dims, g.data());
        const double max_cur_norm = *std::max_element(norms.begin() + cur, norms.begin() + cur + m);

        double pos = 0.0;
        double match = 0.0;
        std::vector<double> screen(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto a = tokens.token(prev + i);
            pos += std::sqrt(detail::squared_distance_sequential(tokens.token(cur + i), a));

            // Screen with the expanded form, then settle the minimum exactly
            // over every candidate the rounding bound cannot exclude.
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                screen[j] = norms[prev + i] + norms[cur + j] - 2.0 * g[i * m + j];
                lowest = std::min(lowest, screen[j]);
            }
            const double slack = 2.0 * rel_bound * (norms[prev + i] + max_cur_norm);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                if (screen[j] > lowest + slack) continue;
                best = std::min(best, detail::squared_distance_sequential(a, tokens.token(cur + j)));
            }
            match += std::sqrt(best);
        }
        trace.diff_pos[k] = pos / static_cast<double>(m);
        trace.diff_match[k] = match / static_cast<double>(m);
        trace.diff_total[k] = trace.diff_pos[k] + trace.diff_match[k];
    });
    return trace;
}

Deviations deviations(std::span<const double> diff) {
    if (diff.empty()) fail(ErrorKind::invalid_argument, "deviations need at least one diff value");
    const std::size_t n = diff.size();
    Deviations out{std::vector<double>(n), std::vector<double>(n)};
    auto rel = [](double here, double there) {
        return (here - there) / std::max(there, relative_deviation_floor);
    };
    for (std::size_t k = 0; k < n; ++k) {
        const bool left = k > 0;
        const bool right = k + 1 < n;
        if (left && right) {
            out.dev[k] = std::max(diff[k] - diff[k - 1], diff[k] - diff[k + 1]);
            out.dev_rel[k] = std::max(rel(diff[k], diff[k - 1]), rel(diff[k], diff[k + 1]));
        } else if (left) {
            out.dev[k] = diff[k] - diff[k - 1];
            out.dev_rel[k] = rel(diff[k], diff[k - 1]);
        } else if (right) {
            out.dev[k] = diff[k] - diff[k + 1];
            out.dev_rel[k] = rel(diff[k], diff[k + 1]);
        } else {
            out.dev[k] = 0.0;
            out.dev_rel[k] = 0.0;
        }
    }
    return out;
}

DiffTrace compute_trace(const TensorView& tokens, const ExecOptions& exec) {
    if (tokens.frames() < 2) return {};
    auto trace = frame_diff(tokens, exec);
    auto dev = deviations(trace.diff_total);
    trace.dev = std::move(dev.dev);
    trace.dev_rel = std::move(dev.dev_rel);
    return trace;
}

IntervalSet IntervalSet::from_boundaries(std::vector<std::size_t> boundaries, std::size_t frames) {
    if (frames == 0) fail(ErrorKind::invalid_argument, "interval set needs at least one frame");
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
    if (!boundaries.empty() && (boundaries.front() == 0 || boundaries.back() >= frames))
        fail(ErrorKind::invalid_argument, "interval boundaries must lie in [1, T)");
    IntervalSet set;
    set.frames = frames;
    set.boundaries = std::move(boundaries);
    std::size_t start = 0;
    for (std::size_t b : set.boundaries) {
        set.intervals.push_back({start, b - 1});
        start = b;
    }
    set.intervals.push_back({start, frames - 1});
    return set;
}

std::size_t IntervalSet::interval_of(std::size_t frame) const {
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), frame);
    return static_cast<std::size_t>(it - boundaries.begin());
}

bool is_boundary(const DiffTrace& trace, std::size_t k, const RetentionConfig& cfg) {
    return trace.diff_total[k] > cfg.tau_diff ||
           (trace.dev[k] > cfg.tau_dev && trace.dev_rel[k] > cfg.tau_rel);
}

IntervalSet detect_boundaries(const DiffTrace& trace, const RetentionConfig& cfg) {
    const std::size_t n = trace.size();
    if (trace.dev.size() != n || trace.dev_rel.size() != n)
        fail(ErrorKind::invalid_argument, "trace is missing deviation signals");
    std::vector<std::size_t> boundaries;
    for (std::size_t k = 0; k < n; ++k)
        if (is_boundary(trace, k, cfg)) boundaries.push_back(k + 1);
    return IntervalSet::from_boundaries(std::move(boundaries), trace.frames());
}

double percentile(std::vector<double> values, double pct) {
    if (values.empty()) fail(ErrorKind::invalid_argument, "percentile of an empty sample");
    if (!(pct >= 0.0 && pct <= 100.0)) fail(ErrorKind::invalid_argument, "percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double rank = pct / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ThresholdSuggestion suggest_thresholds(std::span<const DiffTrace> traces, double pct, double margin) {
    std::vector<double> diff, dev, rel;
    for (const auto& t : traces) {
        diff.insert(diff.end(), t.diff_total.begin(), t.diff_total.end());
        dev.insert(dev.end(), t.dev.begin(), t.dev.end());
        rel.insert(rel.end(), t.dev_rel.begin(), t.dev_rel.end());
    }
    if (diff.empty()) fail(ErrorKind::invalid_argument, "no frame transitions to calibrate on");
    ThresholdSuggestion s;
    s.tau_diff = margin * percentile(diff, pct);
    s.tau_dev = margin * percentile(dev, pct);
    s.tau_rel = margin * percentile(rel, pct);
    s.n_traces = traces.size();
    s.n_values = diff.size();
    return s;
}

void write_trace_csv(std::ostream& out, const DiffTrace& trace, const RetentionConfig& cfg) {
    out << "t,diff_pos,diff_match,diff_total,dev,dev_rel,is_boundary\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << (k + 1) << ',' << trace.diff_pos[k] << ',' << trace.diff_match[k] << ','
            << trace.diff_total[k] << ',' << trace.dev[k] << ',' << trace.dev_rel[k] << ','
            << (is_boundary(trace, k, cfg) ? 1 : 0) << '\n';
    }
}

} // namespace kitoke

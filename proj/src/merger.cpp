#include "kitoke/merger.hpp"

#include "kitoke/error.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kitoke {

namespace {

constexpr std::size_t chunk_rows = 256;
constexpr std::size_t unassigned = std::numeric_limits<std::size_t>::max();

double exact_cosine(double dot, double norm_a, double norm_b) noexcept {
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return dot / (norm_a * norm_b);
}

struct WorkItem {
    std::size_t interval;
    std::size_t begin; // offset into the interval's unselected list
    std::size_t end;
};

} // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b) noexcept {
    return exact_cosine(detail::dot_sequential(a, b), std::sqrt(detail::squared_norm_sequential(a)),
                        std::sqrt(detail::squared_norm_sequential(b)));
}

MergePlan plan_merge(const TensorView& tokens, const Selection& selection, const IntervalSet& intervals,
                     const ExecOptions& exec) {
    const std::size_t n = tokens.tokens();
    if (selection.retained.empty()) fail(ErrorKind::invalid_argument, "nothing retained to merge into");
    if (selection.retained.size() + selection.discarded.size() != n)
        fail(ErrorKind::invalid_argument, "selection does not cover the tensor's tokens");
    if (intervals.frames != tokens.frames())
        fail(ErrorKind::invalid_argument, "interval set covers " + std::to_string(intervals.frames) +
                                              " frames, tensor has " + std::to_string(tokens.frames()));
    if (!std::is_sorted(selection.retained.begin(), selection.retained.end()) ||
        selection.retained.back() >= n)
        fail(ErrorKind::invalid_argument, "retained indices must be ascending and in range");

    const std::size_t n_intervals = intervals.intervals.size();
    std::vector<std::vector<std::size_t>> retained_in(n_intervals), unselected_in(n_intervals);
    for (std::size_t r : selection.retained)
        retained_in[intervals.interval_of(tokens.frame_of(r))].push_back(r);
    for (std::size_t u : selection.discarded) {
        if (u >= n) fail(ErrorKind::invalid_argument, "discarded index out of range");
        unselected_in[intervals.interval_of(tokens.frame_of(u))].push_back(u);
    }

    MergePlan plan;
    plan.retained = selection.retained;
    plan.assignment.assign(n, unassigned);
    for (std::size_t r : plan.retained) plan.assignment[r] = r;
    plan.per_interval.resize(n_intervals);

    std::vector<double> norm(n);
    for (std::size_t i = 0; i < n; ++i) norm[i] = std::sqrt(detail::squared_norm_sequential(tokens.token(i)));

    // Candidate blocks: the interval's own retained tokens, or all of them.
    std::vector<detail::RowBlock> candidate_rows(n_intervals);
    std::vector<WorkItem> work;
    for (std::size_t k = 0; k < n_intervals; ++k) {
        auto& stats = plan.per_interval[k];
        stats.retained = retained_in[k].size();
        stats.unselected = unselected_in[k].size();
        if (unselected_in[k].empty()) continue;
        if (retained_in[k].empty()) {
            stats.fallback = true;
            plan.fallback_tokens += unselected_in[k].size();
            retained_in[k] = plan.retained;
        }
        candidate_rows[k] = detail::gather(tokens, retained_in[k]);
        for (std::size_t b = 0; b < unselected_in[k].size(); b += chunk_rows)
            work.push_back({k, b, std::min(b + chunk_rows, unselected_in[k].size())});
    }

    const double slack = 2.0 * detail::reduction_error_bound(tokens.dims());
    parallel_for(work.size(), resolve_threads(exec), [&](std::size_t w) {
        const auto& item = work[w];
        const auto& cands = retained_in[item.interval];
        const auto& cand_rows = candidate_rows[item.interval];
        const std::span<const std::size_t> rows(unselected_in[item.interval].data() + item.begin,
                                                item.end - item.begin);
        const auto queries = detail::gather(tokens, rows);
        const std::size_t nc = cands.size();
        std::vector<double> g(rows.size() * nc);
        detail::gram(queries.values.data(), rows.size(), cand_rows.values.data(), nc, tokens.dims(), g.data());

        std::vector<double> screen(nc);
        for (std::size_t q = 0; q < rows.size(); ++q) {
            const std::size_t u = rows[q];
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < nc; ++c) {
                screen[c] = exact_cosine(g[q * nc + c], norm[u], norm[cands[c]]);
                top = std::max(top, screen[c]);
            }
            // Re-evaluate every candidate within rounding reach of the top.
            std::size_t best = unassigned;
            double best_cos = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < nc; ++c) {
                if (screen[c] < top - slack) continue;
                const double cs = exact_cosine(detail::dot_sequential(tokens.token(u), tokens.token(cands[c])),
                                               norm[u], norm[cands[c]]);
                if (cs > best_cos) {
                    best_cos = cs;
                    best = cands[c];
                }
            }
            plan.assignment[u] = best;
        }
    });

    plan.groups.resize(plan.retained.size());
    for (std::size_t u : selection.discarded) {
        const std::size_t target = plan.assignment[u];
        const auto it = std::lower_bound(plan.retained.begin(), plan.retained.end(), target);
        plan.groups[static_cast<std::size_t>(it - plan.retained.begin())].push_back(u);
    }
    return plan;
}

MergedTokens apply_merge(const TensorView& tokens, const DiversityProfile& profile, const MergePlan& plan,
                         MergeMode mode) {
    const std::size_t dims = tokens.dims();
    if (profile.size() != tokens.tokens())
        fail(ErrorKind::invalid_argument, "diversity profile does not match the tensor");
    if (plan.groups.size() != plan.retained.size())
        fail(ErrorKind::invalid_argument, "merge plan groups do not match retained tokens");

    MergedTokens out;
    out.retained_indices = plan.retained;
    out.dims = dims;
    out.embeddings.resize(plan.retained.size() * dims);
    std::vector<double> acc(dims);

    for (std::size_t r = 0; r < plan.retained.size(); ++r) {
        const std::size_t keep = plan.retained[r];
        const auto& group = plan.groups[r];
        float* dst = out.embeddings.data() + r * dims;
        const auto self = tokens.token(keep);
        if (mode == MergeMode::none || group.empty()) {
            std::copy(self.begin(), self.end(), dst);
            continue;
        }
        // Weights are scaled by the group's largest score; equal scores then
        // give unit weights and the same arithmetic as the uniform mean.
        double scale = 1.0;
        if (mode == MergeMode::weighted) {
            scale = profile.score[keep];
            for (std::size_t u : group) scale = std::max(scale, profile.score[u]);
        }
        auto weight = [&](std::size_t i) { return mode == MergeMode::weighted ? profile.score[i] / scale : 1.0; };

        std::fill(acc.begin(), acc.end(), 0.0);
        double total = 0.0;
        auto add = [&](std::size_t i) {
            const double w = weight(i);
            const auto v = tokens.token(i);
            for (std::size_t d = 0; d < dims; ++d) acc[d] += w * static_cast<double>(v[d]);
            total += w;
        };
        add(keep);
        for (std::size_t u : group) add(u);
        if (!(total > 0.0)) fail(ErrorKind::numeric, "merge weights sum to zero");
        for (std::size_t d = 0; d < dims; ++d) dst[d] = static_cast<float>(acc[d] / total);
    }
    return out;
}

std::vector<bool> apply_newline_rule(const LayoutSpec& layout, const Selection& selection,
                                     std::size_t frames, std::size_t tokens_per_frame) {
    layout.validate(tokens_per_frame);
    std::vector<bool> keep(frames * layout.rows_per_frame, false);
    for (std::size_t idx : selection.retained) {
        const std::size_t frame = idx / tokens_per_frame;
        if (frame >= frames) fail(ErrorKind::invalid_argument, "retained index outside the layout");
        const std::size_t row = (idx % tokens_per_frame) / layout.cols_per_row;
        keep[frame * layout.rows_per_frame + row] = true;
    }
    return keep;
}

} // namespace kitoke

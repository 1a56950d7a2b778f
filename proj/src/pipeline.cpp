#include "kitoke/pipeline.hpp"

#include "kitoke/error.hpp"

#include <chrono>
#include <utility>

namespace kitoke {

namespace {

template <typename F>
auto run_stage(const char* stage, double& elapsed_ms, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        } else {
            auto value = body();
            elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            return value;
        }
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(stage) + ": " + e.what(), stage);
    }
}

} // namespace

TokenTensor CompressionResult::as_tensor() const {
    return TokenTensor(1, retained_indices.size(), dims, merged_embeddings);
}

bool same_outcome(const CompressionResult& a, const CompressionResult& b) {
    auto report_key = [](const RunReport& r) {
        return std::tie(r.n_tokens_in, r.n_tokens_out, r.gamma, r.n_intervals, r.config, r.generator, r.seed,
                        r.capping_rounds, r.fallback_tokens, r.median_squared_distance);
    };
    auto interval_key = [](const std::vector<IntervalReport>& v) {
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, bool>> keys;
        for (const auto& i : v) keys.emplace_back(i.frames.start, i.frames.end, i.retained, i.unselected, i.fallback);
        return keys;
    };
    return a.retained_indices == b.retained_indices && a.dims == b.dims &&
           a.merged_embeddings == b.merged_embeddings && a.groups == b.groups && a.intervals == b.intervals &&
           a.newline_mask == b.newline_mask && report_key(a.report) == report_key(b.report) &&
           interval_key(a.report.per_interval) == interval_key(b.report.per_interval);
}

CompressionArtifacts compress_detailed(const TensorView& tokens, const RetentionConfig& cfg,
                                       const std::optional<LayoutSpec>& layout, const ExecOptions& exec) {
    double validate_ms = 0.0;
    run_stage("validate", validate_ms, [&] {
        cfg.validate();
        check_finite(tokens);
        if (retention_budget(cfg.gamma, tokens.tokens()) == 0)
            fail(ErrorKind::invalid_argument, "budget floor(gamma * N) is zero for N = " +
                                                  std::to_string(tokens.tokens()));
        if (layout) layout->validate(tokens.tokens_per_frame());
    });

    CompressionArtifacts out;
    auto& report = out.result.report;

    out.profile = run_stage("diversity", report.timings.diversity_ms, [&] {
        report.median_squared_distance = median_squared_distance(tokens);
        return estimate_diversity(tokens, cfg.alpha, exec);
    });

    SelectionPlan plan;
    const auto selection = run_stage("selection", report.timings.selection_ms, [&] {
        plan = build_plan(out.profile, cfg.gamma, cfg.selection_mode, cfg.seed);
        return select(plan);
    });

    out.result.intervals = run_stage("segmentation", report.timings.segmentation_ms, [&] {
        out.trace = compute_trace(tokens, exec);
        if (tokens.frames() < 2) return IntervalSet::single(tokens.frames());
        return detect_boundaries(out.trace, cfg);
    });

    run_stage("merge", report.timings.merge_ms, [&] {
        const auto merge_plan = plan_merge(tokens, selection, out.result.intervals, exec);
        auto merged = apply_merge(tokens, out.profile, merge_plan, cfg.merge_mode);
        out.result.retained_indices = std::move(merged.retained_indices);
        out.result.dims = merged.dims;
        out.result.merged_embeddings = std::move(merged.embeddings);
        out.result.groups = merge_plan.groups;
        if (layout && layout->newline_after_row)
            out.result.newline_mask =
                apply_newline_rule(*layout, selection, tokens.frames(), tokens.tokens_per_frame());

        report.fallback_tokens = merge_plan.fallback_tokens;
        for (std::size_t k = 0; k < merge_plan.per_interval.size(); ++k) {
            const auto& s = merge_plan.per_interval[k];
            report.per_interval.push_back({out.result.intervals.intervals[k], s.retained, s.unselected, s.fallback});
        }
    });

    report.n_tokens_in = tokens.tokens();
    report.n_tokens_out = out.result.retained_indices.size();
    report.gamma = cfg.gamma;
    report.n_intervals = out.result.intervals.intervals.size();
    report.config = cfg;
    report.generator = std::string(generator_id);
    report.seed = cfg.seed;
    report.capping_rounds = plan.capping_rounds;
    return out;
}

} // namespace kitoke

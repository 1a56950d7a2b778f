#include "kitoke/report_json.hpp"

#include <string>

namespace kitoke {

using nlohmann::json;

json to_json(const RetentionConfig& cfg) {
    return {{"gamma", cfg.gamma},
            {"alpha", cfg.alpha},
            {"tau_diff", cfg.tau_diff},
            {"tau_dev", cfg.tau_dev},
            {"tau_rel", cfg.tau_rel},
            {"selection_mode", std::string(to_string(cfg.selection_mode))},
            {"merge_mode", std::string(to_string(cfg.merge_mode))},
            {"seed", cfg.seed}};
}

json to_json(const IntervalSet& intervals) {
    json list = json::array();
    for (const auto& i : intervals.intervals) list.push_back({i.start, i.end});
    return list;
}

json to_json(const RunReport& r) {
    json per_interval = json::array();
    for (const auto& i : r.per_interval)
        per_interval.push_back({{"start", i.frames.start},
                                {"end", i.frames.end},
                                {"retained", i.retained},
                                {"unselected", i.unselected},
                                {"fallback", i.fallback}});
    return {{"n_tokens_in", r.n_tokens_in},
            {"n_tokens_out", r.n_tokens_out},
            {"gamma", r.gamma},
            {"n_intervals", r.n_intervals},
            {"per_interval", per_interval},
            {"timings_ms",
             {{"diversity", r.timings.diversity_ms},
              {"selection", r.timings.selection_ms},
              {"segmentation", r.timings.segmentation_ms},
              {"merge", r.timings.merge_ms}}},
            {"config", to_json(r.config)},
            {"generator", r.generator},
            {"seed", r.seed},
            {"capping_rounds", r.capping_rounds},
            {"fallback_tokens", r.fallback_tokens},
            {"median_squared_distance", r.median_squared_distance}};
}

json to_json(const CompressionResult& result) {
    json doc = {{"retained_indices", result.retained_indices},
                {"intervals", to_json(result.intervals)},
                {"boundaries", result.intervals.boundaries},
                {"mode", std::string(to_string(result.report.config.selection_mode))},
                {"merge", std::string(to_string(result.report.config.merge_mode))},
                {"seed", result.report.seed},
                {"config", to_json(result.report.config)},
                {"groups", result.groups},
                {"report", to_json(result.report)}};
    if (result.newline_mask) doc["newline_mask"] = *result.newline_mask;
    return doc;
}

json to_json(const ThresholdSuggestion& s) {
    return {{"tau_diff", s.tau_diff},
            {"tau_dev", s.tau_dev},
            {"tau_rel", s.tau_rel},
            {"n_videos", s.n_traces},
            {"n_values", s.n_values}};
}

} // namespace kitoke

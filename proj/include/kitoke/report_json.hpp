#pragma once

#include "kitoke/config.hpp"
#include "kitoke/pipeline.hpp"
#include "kitoke/segmenter.hpp"

#include "json.hpp"

namespace kitoke {

nlohmann::json to_json(const RetentionConfig& cfg);
nlohmann::json to_json(const IntervalSet& intervals);
nlohmann::json to_json(const RunReport& report);

// {retained_indices, intervals, mode, merge, seed, config, groups,
//  newline_mask?, report}. Interval frames are 0-based and inclusive.
nlohmann::json to_json(const CompressionResult& result);

nlohmann::json to_json(const ThresholdSuggestion& suggestion);

} // namespace kitoke

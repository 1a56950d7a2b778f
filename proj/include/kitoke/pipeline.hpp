#pragma once

#include "kitoke/config.hpp"
#include "kitoke/diversity.hpp"
#include "kitoke/merger.hpp"
#include "kitoke/parallel.hpp"
#include "kitoke/segmenter.hpp"
#include "kitoke/selector.hpp"
#include "kitoke/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kitoke {

struct StageTimings {
    double diversity_ms = 0.0;
    double selection_ms = 0.0;
    double segmentation_ms = 0.0;
    double merge_ms = 0.0;
};

struct IntervalReport {
    Interval frames;
    std::size_t retained = 0;
    std::size_t unselected = 0;
    bool fallback = false;
};

struct RunReport {
    std::size_t n_tokens_in = 0;
    std::size_t n_tokens_out = 0;
    double gamma = 0.0;
    std::size_t n_intervals = 0;
    std::vector<IntervalReport> per_interval;
    StageTimings timings; // wall clock, excluded from result equality
    RetentionConfig config;
    std::string generator;
    std::uint64_t seed = 0;
    std::size_t capping_rounds = 0;
    std::size_t fallback_tokens = 0;
    double median_squared_distance = 0.0; // bandwidth sanity check
};

struct CompressionResult {
    std::vector<std::size_t> retained_indices; // ascending
    std::size_t dims = 0;
    std::vector<float> merged_embeddings;      // K x D
    std::vector<std::vector<std::size_t>> groups;
    IntervalSet intervals;
    std::optional<std::vector<bool>> newline_mask;
    RunReport report;

    // Merged tokens as a one-frame tensor (T = 1, M = K).
    TokenTensor as_tensor() const;
};

// Equality of everything except wall-clock timings.
bool same_outcome(const CompressionResult& a, const CompressionResult& b);

// Intermediate products, kept for dumps and diagnostics.
struct CompressionArtifacts {
    DiversityProfile profile;
    DiffTrace trace;
    CompressionResult result;
};

// diversity -> selection -> segmentation -> merge (+ newline rule when a
// layout with newline tokens is given). Errors carry the failing stage.
CompressionArtifacts compress_detailed(const TensorView& tokens, const RetentionConfig& cfg,
                                       const std::optional<LayoutSpec>& layout = std::nullopt,
                                       const ExecOptions& exec = {});

inline CompressionResult compress(const TensorView& tokens, const RetentionConfig& cfg,
                                  const std::optional<LayoutSpec>& layout = std::nullopt,
                                  const ExecOptions& exec = {}) {
    return compress_detailed(tokens, cfg, layout, exec).result;
}

} // namespace kitoke

#pragma once

#include "kitoke/config.hpp"
#include "kitoke/diversity.hpp"
#include "kitoke/parallel.hpp"
#include "kitoke/segmenter.hpp"
#include "kitoke/selector.hpp"
#include "kitoke/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace kitoke {

struct IntervalMergeStats {
    std::size_t retained = 0;
    std::size_t unselected = 0;
    bool fallback = false; // no retained token inside, merged globally
};

struct MergePlan {
    std::vector<std::size_t> retained;            // ascending
    std::vector<std::size_t> assignment;          // per token: target retained index (self for retained)
    std::vector<std::vector<std::size_t>> groups; // groups[r]: unselected tokens merged into retained[r]
    std::vector<IntervalMergeStats> per_interval;
    std::size_t fallback_tokens = 0;
};

// Cosine similarity with zero-norm vectors treated as orthogonal to everything.
double cosine_similarity(std::span<const float> a, std::span<const float> b) noexcept;

// Sends every unselected token to the most cosine-similar retained token in
// its own interval (lower index wins ties). Tokens of intervals without any
// retained token go to the most similar retained token overall.
// Errors: invalid_argument on an empty or inconsistent selection.
MergePlan plan_merge(const TensorView& tokens, const Selection& selection, const IntervalSet& intervals,
                     const ExecOptions& exec = {});

struct MergedTokens {
    std::vector<std::size_t> retained_indices;
    std::size_t dims = 0;
    std::vector<float> embeddings; // K x D, row r belongs to retained_indices[r]

    std::span<const float> row(std::size_t r) const noexcept {
        return std::span<const float>(embeddings).subspan(r * dims, dims);
    }
};

// weighted: (S_r x_r + sum S_u x_u) / (S_r + sum S_u), float64 accumulation.
// uniform:  plain mean over {r} and its group.
// none:     x_r unchanged, unselected tokens dropped.
MergedTokens apply_merge(const TensorView& tokens, const DiversityProfile& profile, const MergePlan& plan,
                         MergeMode mode);

// One flag per (frame, row) newline slot, frame-major: kept iff the row keeps
// at least one visual token. Errors: invalid_argument on layout mismatch.
std::vector<bool> apply_newline_rule(const LayoutSpec& layout, const Selection& selection,
                                     std::size_t frames, std::size_t tokens_per_frame);

} // namespace kitoke

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace kitoke {

enum class SelectionMode { pivotal, multinomial, topk };
enum class MergeMode { none, uniform, weighted };

std::string_view to_string(SelectionMode mode);
std::string_view to_string(MergeMode mode);
// Throw invalid_argument on unknown names.
SelectionMode parse_selection_mode(std::string_view name);
MergeMode parse_merge_mode(std::string_view name);

// Retention settings for one compression call. Defaults are the single
// cross-backbone setting: bandwidth 800 and thresholds 110 / 70 / 40%.
struct RetentionConfig {
    double gamma = 0.10;
    double alpha = 800.0;    // kernel bandwidth, squared-distance units
    double tau_diff = 110.0; // frame difference magnitude
    double tau_dev = 70.0;   // absolute deviation from neighbours
    double tau_rel = 0.40;   // relative deviation from neighbours
    SelectionMode selection_mode = SelectionMode::pivotal;
    MergeMode merge_mode = MergeMode::weighted;
    std::uint64_t seed = 0;

    // Checks ranges that do not depend on the tensor.
    void validate() const;

    friend bool operator==(const RetentionConfig&, const RetentionConfig&) = default;
};

// K = floor(gamma * N). A 1e-9 slack absorbs representation error in gamma
// (0.29 * 100 evaluates to 28.999999999999996).
std::size_t retention_budget(double gamma, std::size_t n_tokens);

// Spatial layout of one frame: H rows of W tokens, optionally followed by a
// newline token after each row (LLaVA-Video style).
struct LayoutSpec {
    std::size_t rows_per_frame = 0;
    std::size_t cols_per_row = 0;
    bool newline_after_row = true;

    // Throws invalid_argument unless H*W == tokens_per_frame.
    void validate(std::size_t tokens_per_frame) const;

    friend bool operator==(const LayoutSpec&, const LayoutSpec&) = default;
};

} // namespace kitoke

#include "kitoke/config.hpp"

#include "kitoke/error.hpp"

#include <cmath>
#include <string>

namespace kitoke {

std::string_view to_string(SelectionMode mode) {
    switch (mode) {
    case SelectionMode::pivotal: return "pivotal";
    case SelectionMode::multinomial: return "multinomial";
    case SelectionMode::topk: return "topk";
    }
    return "unknown";
}

std::string_view to_string(MergeMode mode) {
    switch (mode) {
    case MergeMode::none: return "none";
    case MergeMode::uniform: return "uniform";
    case MergeMode::weighted: return "weighted";
    }
    return "unknown";
}

SelectionMode parse_selection_mode(std::string_view name) {
    if (name == "pivotal") return SelectionMode::pivotal;
    if (name == "multinomial") return SelectionMode::multinomial;
    if (name == "topk") return SelectionMode::topk;
    fail(ErrorKind::invalid_argument, "unknown selection mode '" + std::string(name) + "'");
}

MergeMode parse_merge_mode(std::string_view name) {
    if (name == "none") return MergeMode::none;
    if (name == "uniform") return MergeMode::uniform;
    if (name == "weighted") return MergeMode::weighted;
    fail(ErrorKind::invalid_argument, "unknown merge mode '" + std::string(name) + "'");
}

void RetentionConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) fail(ErrorKind::invalid_argument, what);
    };
    require(std::isfinite(gamma) && gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
    require(std::isfinite(tau_diff) && tau_diff > 0.0, "tau_diff must be positive");
    require(std::isfinite(tau_dev) && tau_dev > 0.0, "tau_dev must be positive");
    require(std::isfinite(tau_rel) && tau_rel > 0.0, "tau_rel must be positive");
}

std::size_t retention_budget(double gamma, std::size_t n_tokens) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        fail(ErrorKind::invalid_argument, "gamma must lie in (0, 1]");
    const double k = std::floor(gamma * static_cast<double>(n_tokens) + 1e-9);
    const auto budget = static_cast<std::size_t>(k);
    return budget > n_tokens ? n_tokens : budget;
}

void LayoutSpec::validate(std::size_t tokens_per_frame) const {
    if (rows_per_frame == 0 || cols_per_row == 0)
        fail(ErrorKind::invalid_argument, "layout rows and columns must be positive");
    if (rows_per_frame * cols_per_row != tokens_per_frame)
        fail(ErrorKind::invalid_argument,
             "layout " + std::to_string(rows_per_frame) + "x" + std::to_string(cols_per_row) +
                 " does not match " + std::to_string(tokens_per_frame) + " tokens per frame");
}

} // namespace kitoke

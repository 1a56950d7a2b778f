#pragma once

#include "kitoke/config.hpp"
#include "kitoke/diversity.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace kitoke {

// Identifier of the PRNG behind every stochastic selection mode. Uniform
// variates are (x >> 11) * 2^-53 of successive 64-bit outputs.
inline constexpr std::string_view generator_id = "std::mt19937_64";

struct SelectionPlan {
    std::size_t budget = 0;             // K = floor(gamma * N)
    std::vector<double> scores;         // raw selection weights S_i
    std::vector<double> inclusion_prob; // capped pi_i, sums to K
    SelectionMode mode = SelectionMode::pivotal;
    std::uint64_t seed = 0;
    std::size_t capping_rounds = 0;     // rounds that clamped at least one entry

    std::size_t size() const noexcept { return scores.size(); }
};

struct Selection {
    std::vector<std::size_t> retained;  // ascending, |retained| = K
    std::vector<std::size_t> discarded; // ascending complement
};

// pi_i starts at K * S_i / sum(S). Entries reaching 1 are fixed at 1 and the
// remaining budget is spread over the others in proportion to their scores,
// until no entry exceeds 1.
//
// Errors: invalid_argument for gamma outside (0, 1], a zero budget, negative
// or non-finite scores; numeric when fewer than K scores are positive.
std::vector<double> capped_inclusion_probabilities(std::span<const double> scores, std::size_t budget,
                                                   std::size_t* rounds = nullptr);

SelectionPlan build_plan(std::span<const double> scores, double gamma, SelectionMode mode,
                         std::uint64_t seed);
inline SelectionPlan build_plan(const DiversityProfile& profile, double gamma, SelectionMode mode,
                                std::uint64_t seed) {
    return build_plan(profile.score, gamma, mode, seed);
}

// pivotal: ordered pivotal sampling over ascending index with pi, exact size K.
// multinomial: K sequential draws without replacement, P proportional to S.
// topk: K largest scores, lower index wins ties.
Selection select(const SelectionPlan& plan);

} // namespace kitoke

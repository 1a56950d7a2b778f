#pragma once

// Naive reference implementations. They share no code with the optimized
// library paths: plain double loops, no tiling, single-threaded.

#include "kitoke/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace kitoke::testkit {

std::vector<double> oracle_density(const TensorView& tokens, double alpha);

struct OracleDiff {
    std::vector<double> pos, match, total;
};
OracleDiff oracle_diff(const TensorView& tokens);

struct OracleDeviations {
    std::vector<double> dev, dev_rel;
};
// Same neighbour and floor conventions as the library.
OracleDeviations oracle_deviations(std::span<const double> diff, double floor = 1e-9);

// frame_interval[t] is the interval id of frame t. Returns, for every token,
// the retained token it merges into (retained tokens map to themselves).
std::vector<std::size_t> oracle_assign(const TensorView& tokens, std::span<const std::size_t> retained,
                                       std::span<const std::size_t> frame_interval);

} // namespace kitoke::testkit

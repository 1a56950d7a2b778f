#pragma once

#include "kitoke/parallel.hpp"
#include "kitoke/tensor.hpp"
#include "kitoke/tensor_io.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace kitoke {

// Global kernel density of every token and its inverse, the diversity score.
struct DiversityProfile {
    std::vector<double> density; // >= 1, includes the self term
    std::vector<double> score;   // 1 / density
    double alpha = 0.0;

    std::size_t size() const noexcept { return density.size(); }
};

// Gaussian similarity exp(-|a - b|^2 / alpha).
double kernel(std::span<const float> a, std::span<const float> b, double alpha);

// density[i] = sum_j kernel(x_i, x_j) over all N tokens, j = i included.
//
// The N x N pair space is cut into square tiles; only tiles on or above the
// diagonal are evaluated and each kernel value is credited to both tokens.
// Each tile yields per-token partial sums, and density[i] is the sum of its
// partials in ascending tile order, so the result is bitwise independent of
// the worker count.
DiversityProfile estimate_diversity(const TensorView& tokens, double alpha,
                                    const ExecOptions& exec = {});

// Median pairwise squared distance over an evenly strided subsample of at most
// `sample` tokens. Diagnostic for judging alpha against the embedding scale.
double median_squared_distance(const TensorView& tokens, std::size_t sample = 1000);

// 2 x N table: row 0 density, row 1 score.
Float64Table to_table(const DiversityProfile& profile);
void save_diversity(const DiversityProfile& profile, const std::filesystem::path& path);

} // namespace kitoke

#pragma once

// Dense helpers shared by the compute stages. Not installed.

#include "kitoke/tensor.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace kitoke::detail {

// Row-major float64 copy of a set of tokens.
struct RowBlock {
    std::size_t rows = 0;
    std::size_t dims = 0;
    std::vector<double> values;

    const double* row(std::size_t r) const noexcept { return values.data() + r * dims; }
};

RowBlock widen(const TensorView& view);
RowBlock gather(const TensorView& view, std::span<const std::size_t> tokens);

// out[i * nb + j] = <a_i, b_j>. Always single-threaded BLAS so that results
// depend only on the operand shapes, never on the caller's worker count.
void gram(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t dims,
          double* out);

// Left-to-right float64 reductions; the reference evaluation order.
double dot_sequential(std::span<const float> a, std::span<const float> b) noexcept;
double squared_norm_sequential(std::span<const float> a) noexcept;
double squared_distance_sequential(std::span<const float> a, std::span<const float> b) noexcept;

// Bound on |gram-based value - sequential value| for dot products of length
// `dims`, relative to |a||b| (and for squared distances, to |a|^2 + |b|^2).
inline double reduction_error_bound(std::size_t dims) noexcept {
    return 4.0 * static_cast<double>(dims + 4) * std::numeric_limits<double>::epsilon();
}

} // namespace kitoke::detail

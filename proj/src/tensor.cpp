#include "kitoke/tensor.hpp"

#include "kitoke/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace kitoke {

namespace {

void check_shape(const TensorShape& shape, std::size_t length) {
    if (shape.frames == 0 || shape.tokens_per_frame == 0 || shape.dims == 0)
        fail(ErrorKind::invalid_argument, "tensor extents must be positive (T=" +
                                              std::to_string(shape.frames) +
                                              ", M=" + std::to_string(shape.tokens_per_frame) +
                                              ", D=" + std::to_string(shape.dims) + ")");
    constexpr auto max = std::numeric_limits<std::size_t>::max();
    if (shape.frames > max / shape.tokens_per_frame ||
        shape.tokens() > max / shape.dims)
        fail(ErrorKind::invalid_argument, "tensor extents overflow the address space");
    if (length != shape.elements())
        fail(ErrorKind::invalid_argument, "tensor buffer holds " + std::to_string(length) +
                                              " floats, shape requires " +
                                              std::to_string(shape.elements()));
}

} // namespace

TensorView::TensorView(std::span<const float> data, TensorShape shape)
    : data_(data), shape_(shape) {
    check_shape(shape_, data_.size());
}

void check_finite(const TensorView& view) {
    const auto data = view.data();
    for (std::size_t k = 0; k < data.size(); ++k) {
        if (!std::isfinite(data[k])) {
            const std::size_t token = k / view.dims();
            fail(ErrorKind::numeric, "non-finite value at element " + std::to_string(k) +
                                         " (token " + std::to_string(token) + ", dim " +
                                         std::to_string(k % view.dims()) + ")");
        }
    }
}

TokenTensor::TokenTensor(TensorShape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
    check_shape(shape_, data_.size());
    check_finite(view());
}

TokenTensor::TokenTensor(const TensorView& view)
    : TokenTensor(view.shape(), std::vector<float>(view.data().begin(), view.data().end())) {}

} // namespace kitoke

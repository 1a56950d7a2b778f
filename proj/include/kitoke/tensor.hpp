#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kitoke {

// Shape of a video token stack: T frames of M tokens, each a D-vector.
struct TensorShape {
    std::size_t frames = 0;
    std::size_t tokens_per_frame = 0;
    std::size_t dims = 0;

    std::size_t tokens() const noexcept { return frames * tokens_per_frame; }
    std::size_t elements() const noexcept { return tokens() * dims; }

    friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

// Non-owning, read-only view over a row-major float32 buffer laid out as
// (frame, token, dim). Token (t, i) has flat index M*t + i.
class TensorView {
public:
    TensorView() = default;
    // Throws invalid_argument if any extent is zero or the buffer length
    // does not equal T*M*D. Finiteness is not checked here, see check_finite().
    TensorView(std::span<const float> data, TensorShape shape);

    const TensorShape& shape() const noexcept { return shape_; }
    std::size_t frames() const noexcept { return shape_.frames; }
    std::size_t tokens_per_frame() const noexcept { return shape_.tokens_per_frame; }
    std::size_t dims() const noexcept { return shape_.dims; }
    std::size_t tokens() const noexcept { return shape_.tokens(); }

    std::span<const float> data() const noexcept { return data_; }
    std::span<const float> token(std::size_t flat) const noexcept {
        return data_.subspan(flat * shape_.dims, shape_.dims);
    }
    std::span<const float> token(std::size_t frame, std::size_t index) const noexcept {
        return token(frame * shape_.tokens_per_frame + index);
    }
    std::size_t flat_index(std::size_t frame, std::size_t index) const noexcept {
        return frame * shape_.tokens_per_frame + index;
    }
    std::size_t frame_of(std::size_t flat) const noexcept { return flat / shape_.tokens_per_frame; }

private:
    std::span<const float> data_;
    TensorShape shape_;
};

// Throws numeric error naming the first NaN/Inf element.
void check_finite(const TensorView& view);

// Owning, immutable token stack. Construction validates shape and finiteness.
class TokenTensor {
public:
    TokenTensor(TensorShape shape, std::vector<float> data);
    TokenTensor(std::size_t frames, std::size_t tokens_per_frame, std::size_t dims,
                std::vector<float> data)
        : TokenTensor(TensorShape{frames, tokens_per_frame, dims}, std::move(data)) {}
    // Copies from a view (e.g. a caller-owned buffer).
    explicit TokenTensor(const TensorView& view);

    TensorView view() const noexcept { return TensorView(data_, shape_); }
    operator TensorView() const noexcept { return view(); }

    const TensorShape& shape() const noexcept { return shape_; }
    std::size_t frames() const noexcept { return shape_.frames; }
    std::size_t tokens_per_frame() const noexcept { return shape_.tokens_per_frame; }
    std::size_t dims() const noexcept { return shape_.dims; }
    std::size_t tokens() const noexcept { return shape_.tokens(); }
    std::span<const float> data() const noexcept { return data_; }
    std::span<const float> token(std::size_t flat) const noexcept { return view().token(flat); }
    std::span<const float> token(std::size_t frame, std::size_t index) const noexcept {
        return view().token(frame, index);
    }

    friend bool operator==(const TokenTensor&, const TokenTensor&) = default;

private:
    TensorShape shape_;
    std::vector<float> data_;
};

} // namespace kitoke

#pragma once

#include "kitoke/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kitoke::testkit {

// One stable span of a synthetic video. Token i of local frame f is
//   centers[i % n_centers] + f * drift + noise_sigma * N(0, I).
struct Scene {
    std::size_t n_frames = 0;
    std::vector<float> centers; // n_centers x D, row-major
    double noise_sigma = 0.0;
    std::vector<float> drift;   // D, or empty for none
};

struct SceneScript {
    std::size_t tokens_per_frame = 0;
    std::size_t dims = 0;
    std::vector<Scene> scenes;
    std::uint64_t seed = 0;

    // Throws invalid_argument on a degenerate script.
    void validate() const;
    std::size_t frames() const;
};

struct GeneratedVideo {
    TokenTensor tensor;
    std::vector<std::size_t> boundaries; // 0-based first frame of every scene after the first
};

GeneratedVideo generate_scenes(const SceneScript& script);

// Parameters for the planted-cut family used by tests and `kitoke gen`.
struct PlantedParams {
    std::size_t scenes = 3;
    std::size_t frames_per_scene = 10;
    std::size_t tokens_per_frame = 16;
    std::size_t dims = 32;
    double noise_sigma = 0.05;
    // Minimum distance between same-position centers of consecutive scenes,
    // in units of the expected per-token noise norm sigma * sqrt(D).
    double separation = 10.0;
    // Per-frame drift length, same units as separation.
    double drift = 0.0;
    std::uint64_t seed = 0;
};

SceneScript planted_script(const PlantedParams& params);

// Smallest same-position center distance between consecutive scenes divided
// by sigma * sqrt(D). Infinite for a single scene or sigma = 0.
double separation_ratio(const SceneScript& script);

// Uniform [lo, hi) entries.
TokenTensor random_tensor(std::size_t frames, std::size_t tokens_per_frame, std::size_t dims,
                          std::uint64_t seed, double lo = -1.0, double hi = 1.0);

} // namespace kitoke::testkit

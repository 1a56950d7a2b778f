#include "kitoke/testkit/scenes.hpp"

#include "kitoke/error.hpp"
#include "kitoke/testkit/rng.hpp"

#include <cmath>
#include <limits>

namespace kitoke::testkit {

namespace {

std::vector<float> random_direction(Rng& rng, std::size_t dims, double length) {
    std::vector<double> v(dims);
    double norm2 = 0.0;
    while (norm2 == 0.0) {
        norm2 = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            norm2 += x * x;
        }
    }
    const double scale = length / std::sqrt(norm2);
    std::vector<float> out(dims);
    for (std::size_t d = 0; d < dims; ++d) out[d] = static_cast<float>(v[d] * scale);
    return out;
}

} // namespace

void SceneScript::validate() const {
    if (tokens_per_frame == 0 || dims == 0)
        fail(ErrorKind::invalid_argument, "scene script needs positive M and D");
    if (scenes.empty()) fail(ErrorKind::invalid_argument, "scene script has no scenes");
    for (const auto& s : scenes) {
        if (s.n_frames == 0) fail(ErrorKind::invalid_argument, "scene with zero frames");
        if (s.centers.empty() || s.centers.size() % dims != 0)
            fail(ErrorKind::invalid_argument, "scene centers must be a non-empty n x D block");
        if (!(s.noise_sigma >= 0.0) || !std::isfinite(s.noise_sigma))
            fail(ErrorKind::invalid_argument, "noise sigma must be finite and >= 0");
        if (!s.drift.empty() && s.drift.size() != dims)
            fail(ErrorKind::invalid_argument, "drift vector must have D entries");
    }
}

std::size_t SceneScript::frames() const {
    std::size_t total = 0;
    for (const auto& s : scenes) total += s.n_frames;
    return total;
}

GeneratedVideo generate_scenes(const SceneScript& script) {
    script.validate();
    const std::size_t m = script.tokens_per_frame;
    const std::size_t dims = script.dims;
    Rng rng(script.seed);
    std::vector<float> data;
    data.reserve(script.frames() * m * dims);
    std::vector<std::size_t> boundaries;
    std::size_t frame = 0;
    for (std::size_t s = 0; s < script.scenes.size(); ++s) {
        const auto& scene = script.scenes[s];
        if (s > 0) boundaries.push_back(frame);
        const std::size_t n_centers = scene.centers.size() / dims;
        for (std::size_t f = 0; f < scene.n_frames; ++f, ++frame) {
            for (std::size_t i = 0; i < m; ++i) {
                const float* c = scene.centers.data() + (i % n_centers) * dims;
                for (std::size_t d = 0; d < dims; ++d) {
                    double v = c[d];
                    if (!scene.drift.empty()) v += static_cast<double>(f) * scene.drift[d];
                    if (scene.noise_sigma > 0.0) v += scene.noise_sigma * rng.normal();
                    data.push_back(static_cast<float>(v));
                }
            }
        }
    }
    return {TokenTensor(script.frames(), m, dims, std::move(data)), std::move(boundaries)};
}

SceneScript planted_script(const PlantedParams& p) {
    if (p.scenes == 0 || p.frames_per_scene == 0 || p.tokens_per_frame == 0 || p.dims == 0)
        fail(ErrorKind::invalid_argument, "planted script needs positive counts");
    if (!(p.separation >= 0.0) || !(p.drift >= 0.0) || !(p.noise_sigma >= 0.0))
        fail(ErrorKind::invalid_argument, "planted script parameters must be non-negative");
    Rng rng(p.seed);
    const double unit = (p.noise_sigma > 0.0 ? p.noise_sigma : 1.0) * std::sqrt(static_cast<double>(p.dims));

    SceneScript script;
    script.tokens_per_frame = p.tokens_per_frame;
    script.dims = p.dims;
    script.seed = rng.next();

    std::vector<float> centers(p.tokens_per_frame * p.dims);
    for (auto& c : centers) c = static_cast<float>(rng.normal());
    for (std::size_t s = 0; s < p.scenes; ++s) {
        if (s > 0) {
            for (std::size_t i = 0; i < p.tokens_per_frame; ++i) {
                const double length = p.separation * unit * (1.0 + 0.5 * rng.uniform());
                const auto step = random_direction(rng, p.dims, length);
                for (std::size_t d = 0; d < p.dims; ++d) centers[i * p.dims + d] += step[d];
            }
        }
        Scene scene;
        scene.n_frames = p.frames_per_scene;
        scene.centers = centers;
        scene.noise_sigma = p.noise_sigma;
        if (p.drift > 0.0) scene.drift = random_direction(rng, p.dims, p.drift * unit);
        script.scenes.push_back(std::move(scene));
    }
    return script;
}

double separation_ratio(const SceneScript& script) {
    double ratio = std::numeric_limits<double>::infinity();
    const std::size_t dims = script.dims;
    for (std::size_t s = 1; s < script.scenes.size(); ++s) {
        const auto& a = script.scenes[s - 1];
        const auto& b = script.scenes[s];
        const double sigma = std::max(a.noise_sigma, b.noise_sigma);
        if (sigma == 0.0) continue;
        const std::size_t n = std::min(a.centers.size(), b.centers.size()) / dims;
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < dims; ++d) {
                const double diff = double(a.centers[i * dims + d]) - double(b.centers[i * dims + d]);
                d2 += diff * diff;
            }
            ratio = std::min(ratio, std::sqrt(d2) / (sigma * std::sqrt(static_cast<double>(dims))));
        }
    }
    return ratio;
}

TokenTensor random_tensor(std::size_t frames, std::size_t tokens_per_frame, std::size_t dims,
                          std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    std::vector<float> data(frames * tokens_per_frame * dims);
    for (auto& v : data) v = static_cast<float>(rng.uniform(lo, hi));
    return TokenTensor(frames, tokens_per_frame, dims, std::move(data));
}

} // namespace kitoke::testkit

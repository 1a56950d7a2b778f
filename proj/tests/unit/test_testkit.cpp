#include "doctest.h"

#include "kitoke/error.hpp"
#include "kitoke/pipeline.hpp"
#include "kitoke/testkit/oracles.hpp"
#include "kitoke/testkit/rng.hpp"
#include "kitoke/testkit/scenes.hpp"

#include <cmath>

using namespace kitoke;
using namespace kitoke::testkit;

TEST_CASE("rng streams are reproducible") {
    Rng a(5), b(5), c(6);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    Rng r(1);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / 20000) < 0.05);
    CHECK(sq / 20000 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("generator is deterministic in its seed") {
    PlantedParams p;
    p.seed = 3;
    const auto a = generate_scenes(planted_script(p));
    const auto b = generate_scenes(planted_script(p));
    CHECK(a.tensor == b.tensor);
    p.seed = 4;
    CHECK_FALSE(a.tensor == generate_scenes(planted_script(p)).tensor);
    CHECK(a.boundaries == std::vector<std::size_t>{10, 20});
    CHECK(a.tensor.frames() == 30);
    CHECK(a.tensor.tokens_per_frame() == 16);
    CHECK(a.tensor.dims() == 32);
}

TEST_CASE("planted separation honours its floor") {
    for (double sep : {2.0, 10.0, 25.0}) {
        PlantedParams p;
        p.separation = sep;
        CHECK(separation_ratio(planted_script(p)) >= sep * (1.0 - 1e-6));
    }
    PlantedParams one;
    one.scenes = 1;
    CHECK(std::isinf(separation_ratio(planted_script(one))));
}

TEST_CASE("noise-free static scene has identical frames") {
    PlantedParams p;
    p.scenes = 1;
    p.noise_sigma = 0.0;
    const auto video = generate_scenes(planted_script(p));
    CHECK(video.boundaries.empty());
    const auto trace = compute_trace(video.tensor);
    for (double d : trace.diff_total) CHECK(d == 0.0);
    const auto r = compress(video.tensor, RetentionConfig{});
    CHECK(r.intervals.intervals.size() == 1);
}

TEST_CASE("drift moves every frame by the same step") {
    PlantedParams p;
    p.scenes = 1;
    p.noise_sigma = 0.0;
    p.drift = 1.0;
    const auto video = generate_scenes(planted_script(p));
    const auto trace = compute_trace(video.tensor);
    // With sigma = 0 the drift unit is sqrt(D) per token.
    const double step = std::sqrt(32.0);
    for (double d : trace.diff_pos) CHECK(d == doctest::Approx(step).epsilon(1e-4));
}

TEST_CASE("script validation") {
    SceneScript s;
    CHECK_THROWS_AS(s.validate(), Error);
    s.tokens_per_frame = 2;
    s.dims = 2;
    s.scenes.push_back(Scene{1, {1, 2, 3}, 0.0, {}});
    CHECK_THROWS_AS(s.validate(), Error);
    s.scenes[0].centers = {1, 2};
    CHECK_NOTHROW(s.validate());
    s.scenes[0].drift = {1};
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("oracles on hand examples") {
    const TokenTensor t(2, 2, 1, {0.0f, 1.0f, 1.0f, 0.0f});
    const auto density = oracle_density(t, 1.0);
    // Each token sees itself and one token at distance 1 twice, or the reverse.
    CHECK(density[0] == doctest::Approx(2.0 + 2.0 * std::exp(-1.0)));
    const auto d = oracle_diff(t);
    CHECK(d.pos[0] == 1.0);
    CHECK(d.match[0] == 0.0);
    const std::vector<double> diff{10, 50, 10};
    CHECK(oracle_deviations(diff).dev[1] == 40.0);
    const std::vector<std::size_t> retained{0, 1}, frames{0, 0};
    const auto assign = oracle_assign(t, retained, frames);
    CHECK(assign[2] == 1);
}

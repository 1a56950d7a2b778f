#include "doctest.h"

#include "kitoke/error.hpp"
#include "kitoke/segmenter.hpp"
#include "kitoke/testkit/oracles.hpp"
#include "kitoke/testkit/rng.hpp"
#include "kitoke/testkit/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace kitoke;

namespace {

DiffTrace trace_from(std::vector<double> diff) {
    DiffTrace t;
    t.diff_total = diff;
    t.diff_pos = diff;
    t.diff_match.assign(diff.size(), 0.0);
    auto dev = deviations(diff);
    t.dev = dev.dev;
    t.dev_rel = dev.dev_rel;
    return t;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

} // namespace

TEST_CASE("identical frames have zero difference") {
    std::vector<float> frame{1.0f, 2.0f, -1.0f, 0.5f, 3.0f, 3.0f};
    std::vector<float> data = frame;
    data.insert(data.end(), frame.begin(), frame.end());
    const TokenTensor t(2, 3, 2, data);
    const auto trace = frame_diff(t);
    CHECK(trace.diff_pos == std::vector<double>{0.0});
    CHECK(trace.diff_match == std::vector<double>{0.0});
    CHECK(trace.diff_total == std::vector<double>{0.0});
}

TEST_CASE("a spatial permutation is absorbed by best-match alignment") {
    const auto base = testkit::random_tensor(1, 6, 8, 4, -5.0, 5.0);
    std::vector<float> data(base.data().begin(), base.data().end());
    const std::size_t order[] = {3, 0, 5, 1, 2, 4};
    for (std::size_t i : order) {
        const auto v = base.token(i);
        data.insert(data.end(), v.begin(), v.end());
    }
    const auto trace = frame_diff(TokenTensor(2, 6, 8, data));
    CHECK(trace.diff_match[0] == 0.0);
    CHECK(trace.diff_pos[0] > 0.0);
}

TEST_CASE("frame_diff needs two frames") {
    CHECK_THROWS_AS(frame_diff(testkit::random_tensor(1, 4, 2, 0)), Error);
    CHECK(compute_trace(testkit::random_tensor(1, 4, 2, 0)).size() == 0);
}

TEST_CASE("frame_diff matches the double-loop oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = testkit::random_tensor(4, 6, 8, seed);
        const auto trace = frame_diff(t);
        const auto want = testkit::oracle_diff(t);
        REQUIRE(trace.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(rel_close(trace.diff_pos[k], want.pos[k], 1e-9));
            CHECK(rel_close(trace.diff_match[k], want.match[k], 1e-9));
            CHECK(rel_close(trace.diff_total[k], want.total[k], 1e-9));
            CHECK(trace.diff_total[k] == trace.diff_pos[k] + trace.diff_match[k]);
        }
    }
    // Larger frames with large-norm embeddings stress the screening bound.
    const auto big = testkit::random_tensor(3, 150, 40, 9, 100.0, 101.0);
    const auto trace = frame_diff(big);
    const auto want = testkit::oracle_diff(big);
    for (std::size_t k = 0; k < 2; ++k) CHECK(trace.diff_match[k] == want.match[k]);
}

TEST_CASE("deviation arithmetic") {
    SUBCASE("constant sequence") {
        const auto d = deviations(std::vector<double>{5.0, 5.0, 5.0});
        CHECK(d.dev == std::vector<double>{0.0, 0.0, 0.0});
        CHECK(d.dev_rel == std::vector<double>{0.0, 0.0, 0.0});
    }
    SUBCASE("spike") {
        const auto d = deviations(std::vector<double>{10.0, 50.0, 10.0});
        CHECK(d.dev[1] == 40.0);
        CHECK(d.dev_rel[1] == 4.0);
        // Ends use their only neighbour.
        CHECK(d.dev[0] == -40.0);
        CHECK(d.dev_rel[2] == doctest::Approx(-0.8));
    }
    SUBCASE("zero denominators are floored") {
        const auto d = deviations(std::vector<double>{0.0, 2.0, 0.0});
        CHECK(d.dev_rel[1] == 2.0 / relative_deviation_floor);
        const auto zeros = deviations(std::vector<double>{0.0, 0.0});
        CHECK(zeros.dev_rel == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("single value") {
        const auto d = deviations(std::vector<double>{120.0});
        CHECK(d.dev == std::vector<double>{0.0});
        CHECK(d.dev_rel == std::vector<double>{0.0});
    }
    CHECK_THROWS_AS(deviations(std::vector<double>{}), Error);
}

TEST_CASE("deviations match the direct formula oracle exactly") {
    testkit::Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> diff(20);
        for (auto& v : diff) v = rng.uniform(0.1, 200.0);
        const auto got = deviations(diff);
        const auto want = testkit::oracle_deviations(diff);
        CHECK(got.dev == want.dev);
        CHECK(got.dev_rel == want.dev_rel);
    }
}

TEST_CASE("boundary rule") {
    const RetentionConfig cfg;
    SUBCASE("magnitude alone opens an interval") {
        const auto set = detect_boundaries(trace_from({120.0}), cfg);
        CHECK(set.boundaries == std::vector<std::size_t>{1});
        REQUIRE(set.intervals.size() == 2);
        CHECK(set.intervals[0] == Interval{0, 0});
        CHECK(set.intervals[1] == Interval{1, 1});
    }
    SUBCASE("static video") {
        const auto set = detect_boundaries(trace_from(std::vector<double>(9, 0.0)), cfg);
        CHECK(set.boundaries.empty());
        REQUIRE(set.intervals.size() == 1);
        CHECK(set.intervals[0] == Interval{0, 9});
    }
    SUBCASE("deviation needs both the absolute and relative test") {
        // 100 vs neighbours 20: dev 80 > 70, rel 4 > 0.4 -> boundary.
        CHECK(detect_boundaries(trace_from({20, 100, 20}), cfg).boundaries == std::vector<std::size_t>{2});
        // 105 vs 60: dev 45 fails the absolute test.
        CHECK(detect_boundaries(trace_from({60, 105, 60}), cfg).boundaries.empty());
    }
    SUBCASE("single frame") {
        const auto set = IntervalSet::single(1);
        CHECK(set.intervals == std::vector<Interval>{{0, 0}});
    }
}

TEST_CASE("interval set structure") {
    const auto set = IntervalSet::from_boundaries({7, 3, 3}, 10);
    CHECK(set.boundaries == std::vector<std::size_t>{3, 7});
    CHECK(set.intervals == std::vector<Interval>{{0, 2}, {3, 6}, {7, 9}});
    CHECK(set.interval_of(0) == 0);
    CHECK(set.interval_of(2) == 0);
    CHECK(set.interval_of(3) == 1);
    CHECK(set.interval_of(9) == 2);
    CHECK_THROWS_AS(IntervalSet::from_boundaries({0}, 4), Error);
    CHECK_THROWS_AS(IntervalSet::from_boundaries({4}, 4), Error);
}

TEST_CASE("property: intervals partition the frames; thresholds act monotonically") {
    testkit::Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<double> diff(n);
        for (auto& v : diff) v = rng.uniform(0.0, 200.0);
        const auto trace = trace_from(diff);
        RetentionConfig cfg;
        cfg.tau_diff = rng.uniform(1, 200);
        cfg.tau_dev = rng.uniform(1, 100);
        cfg.tau_rel = rng.uniform(0.05, 2);
        const auto set = detect_boundaries(trace, cfg);
        std::size_t covered = 0;
        for (std::size_t k = 0; k < set.intervals.size(); ++k) {
            CHECK(set.intervals[k].start <= set.intervals[k].end);
            if (k > 0) CHECK(set.intervals[k].start == set.intervals[k - 1].end + 1);
            covered += set.intervals[k].length();
        }
        CHECK(set.intervals.front().start == 0);
        CHECK(covered == n + 1);

        for (double RetentionConfig::*tau : {&RetentionConfig::tau_diff, &RetentionConfig::tau_dev,
                                             &RetentionConfig::tau_rel}) {
            auto raised = cfg;
            raised.*tau *= 1.0 + rng.uniform(0.0, 2.0);
            const auto fewer = detect_boundaries(trace, raised);
            CHECK(fewer.boundaries.size() <= set.boundaries.size());
            CHECK(std::includes(set.boundaries.begin(), set.boundaries.end(), fewer.boundaries.begin(),
                                fewer.boundaries.end()));
        }
    }
}

TEST_CASE("property: best match never exceeds the positional match") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto t = testkit::random_tensor(5, 3 + seed % 20, 4 + seed % 9, seed);
        const auto trace = frame_diff(t);
        for (std::size_t k = 0; k < trace.size(); ++k) CHECK(trace.diff_match[k] <= trace.diff_pos[k]);
    }
}

TEST_CASE("property: translation invariance and scale covariance") {
    // Values on a 1/8 grid keep every shift and doubling exact in float32.
    testkit::Rng rng(42);
    const std::size_t frames = 6, m = 10, dims = 5;
    std::vector<float> base(frames * m * dims), shifted(base.size()), doubled(base.size()), tripled(base.size());
    std::vector<float> offset(dims);
    for (auto& o : offset) o = static_cast<float>(rng.below(64)) / 8.0f - 4.0f;
    for (std::size_t k = 0; k < base.size(); ++k) {
        base[k] = static_cast<float>(rng.below(128)) / 8.0f - 8.0f;
        shifted[k] = base[k] + offset[k % dims];
        doubled[k] = 2.0f * base[k];
        tripled[k] = 3.0f * base[k];
    }
    const auto a = compute_trace(TokenTensor(frames, m, dims, base));
    const auto b = compute_trace(TokenTensor(frames, m, dims, shifted));
    CHECK(a.diff_pos == b.diff_pos);
    CHECK(a.diff_match == b.diff_match);
    CHECK(a.dev == b.dev);
    CHECK(a.dev_rel == b.dev_rel);

    const auto c = compute_trace(TokenTensor(frames, m, dims, doubled));
    const auto d = compute_trace(TokenTensor(frames, m, dims, tripled));
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(c.diff_total[k] == 2.0 * a.diff_total[k]);
        CHECK(c.dev[k] == 2.0 * a.dev[k]);
        CHECK(c.dev_rel[k] == doctest::Approx(a.dev_rel[k]).epsilon(1e-12));
        CHECK(d.diff_pos[k] == doctest::Approx(3.0 * a.diff_pos[k]).epsilon(1e-12));
        CHECK(d.diff_match[k] == doctest::Approx(3.0 * a.diff_match[k]).epsilon(1e-12));
        CHECK(d.dev_rel[k] == doctest::Approx(a.dev_rel[k]).epsilon(1e-9));
    }
}

TEST_CASE("trace is independent of the worker count") {
    const auto t = testkit::random_tensor(9, 20, 6, 3);
    const auto one = compute_trace(t, ExecOptions{1});
    const auto four = compute_trace(t, ExecOptions{4});
    CHECK(one.diff_total == four.diff_total);
    CHECK(one.dev_rel == four.dev_rel);
}

TEST_CASE("planted three-scene video recovers its cuts") {
    testkit::PlantedParams params;
    params.seed = 5;
    const auto script = testkit::planted_script(params);
    const auto video = testkit::generate_scenes(script);
    const auto trace = compute_trace(video.tensor);
    // Hand-picked thresholds for this family; calibration is covered elsewhere.
    RetentionConfig cfg;
    cfg.tau_diff = 3.0;
    cfg.tau_dev = 2.0;
    cfg.tau_rel = 1.0;
    const auto set = detect_boundaries(trace, cfg);
    CHECK(set.boundaries == video.boundaries);
    CHECK(set.boundaries == std::vector<std::size_t>{10, 20});
}

TEST_CASE("percentile and threshold suggestions") {
    CHECK(percentile({1, 2, 3, 4}, 80) == doctest::Approx(3.4));
    CHECK(percentile({5}, 80) == 5.0);
    CHECK(percentile({3, 1, 2}, 100) == 3.0);
    CHECK(percentile({3, 1, 2}, 0) == 1.0);
    CHECK_THROWS_AS(percentile({}, 50), Error);
    CHECK_THROWS_AS(percentile({1}, 101), Error);

    const std::vector<DiffTrace> traces{trace_from({1, 2, 3}), trace_from({4, 5})};
    const auto s = suggest_thresholds(traces, 50);
    CHECK(s.tau_diff == 3.0);
    CHECK(s.n_traces == 2);
    CHECK(s.n_values == 5);
    const auto doubled = suggest_thresholds(traces, 50, 2.0);
    CHECK(doubled.tau_diff == 6.0);
}

TEST_CASE("trace CSV") {
    std::ostringstream out;
    write_trace_csv(out, trace_from({10, 120}), RetentionConfig{});
    const std::string text = out.str();
    CHECK(text.rfind("t,diff_pos,diff_match,diff_total,dev,dev_rel,is_boundary\n", 0) == 0);
    CHECK(text.find("\n1,10,0,10,") != std::string::npos);
    CHECK(text.find(",1\n") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

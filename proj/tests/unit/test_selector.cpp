#include "doctest.h"

#include "kitoke/error.hpp"
#include "kitoke/selector.hpp"
#include "kitoke/testkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace kitoke;

namespace {

std::vector<double> random_scores(std::size_t n, std::uint64_t seed, double lo = 0.01, double hi = 1.0) {
    testkit::Rng rng(seed);
    std::vector<double> s(n);
    for (auto& v : s) v = rng.uniform(lo, hi);
    return s;
}

void check_partition(const Selection& sel, std::size_t n, std::size_t k) {
    REQUIRE(sel.retained.size() == k);
    CHECK(sel.retained.size() + sel.discarded.size() == n);
    CHECK(std::is_sorted(sel.retained.begin(), sel.retained.end()));
    CHECK(std::is_sorted(sel.discarded.begin(), sel.discarded.end()));
    std::vector<std::size_t> all(sel.retained);
    all.insert(all.end(), sel.discarded.begin(), sel.discarded.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
}

} // namespace

TEST_CASE("inclusion probabilities") {
    SUBCASE("uniform scores") {
        const auto plan = build_plan(std::vector<double>(10, 0.3), 0.5, SelectionMode::pivotal, 0);
        CHECK(plan.budget == 5);
        for (double p : plan.inclusion_prob) CHECK(p == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("proportional without capping") {
        const auto pi = capped_inclusion_probabilities(std::vector<double>{0.9, 0.05, 0.05}, 1);
        CHECK(pi[0] == doctest::Approx(0.9).epsilon(1e-15));
        CHECK(pi[1] == doctest::Approx(0.05).epsilon(1e-15));
        CHECK(pi[2] == doctest::Approx(0.05).epsilon(1e-15));
    }
    SUBCASE("one capping round") {
        // 3 * 10/14 > 1 is clamped; the remaining budget 2 splits over four equal scores.
        std::size_t rounds = 0;
        const auto pi = capped_inclusion_probabilities(std::vector<double>{10, 1, 1, 1, 1}, 3, &rounds);
        CHECK(pi == std::vector<double>{1.0, 0.5, 0.5, 0.5, 0.5});
        CHECK(std::accumulate(pi.begin(), pi.end(), 0.0) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(rounds == 1);
    }
    SUBCASE("cascading caps") {
        const auto pi = capped_inclusion_probabilities(std::vector<double>{100, 30, 1, 1, 1, 1}, 4);
        CHECK(pi[0] == 1.0);
        CHECK(pi[1] == 1.0);
        for (int i = 2; i < 6; ++i) CHECK(pi[i] == doctest::Approx(0.5));
    }
    SUBCASE("budget equal to N") {
        const auto pi = capped_inclusion_probabilities(std::vector<double>{5, 1, 0.2}, 3);
        CHECK(pi == std::vector<double>{1.0, 1.0, 1.0});
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(capped_inclusion_probabilities(std::vector<double>{0, 0, 0}, 1), Error);
        CHECK_THROWS_AS(capped_inclusion_probabilities(std::vector<double>{1, 1}, 0), Error);
        CHECK_THROWS_AS(capped_inclusion_probabilities(std::vector<double>{1, -1}, 1), Error);
        CHECK_THROWS_AS(capped_inclusion_probabilities(std::vector<double>{1, 0, 0}, 2), Error);
        CHECK_THROWS_AS(build_plan(std::vector<double>{1, 1, 1}, 0.2, SelectionMode::pivotal, 0), Error);
    }
}

TEST_CASE("property: capped probabilities sum to K and stay in [0, 1]") {
    testkit::Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(200);
        std::vector<double> s(n);
        // Heavy-tailed scores force capping often.
        for (auto& v : s) v = std::pow(rng.uniform(0.001, 1.0), -3.0);
        const std::size_t k = 1 + rng.below(n);
        const auto pi = capped_inclusion_probabilities(s, k);
        CHECK(std::abs(std::accumulate(pi.begin(), pi.end(), 0.0) - static_cast<double>(k)) <= 1e-9);
        for (double p : pi) CHECK((p >= 0.0 && p <= 1.0));
    }
}

TEST_CASE("full budget retains everything in every mode") {
    const auto s = random_scores(12, 1);
    for (auto mode : {SelectionMode::pivotal, SelectionMode::multinomial, SelectionMode::topk}) {
        const auto sel = select(build_plan(s, 1.0, mode, 9));
        check_partition(sel, 12, 12);
        CHECK(sel.discarded.empty());
    }
}

TEST_CASE("top-K ordering and ties") {
    const std::vector<double> s{0.1, 0.9, 0.9};
    auto plan = build_plan(s, 2.0 / 3.0, SelectionMode::topk, 0);
    CHECK(select(plan).retained == std::vector<std::size_t>{1, 2});
    plan = build_plan(s, 1.0 / 3.0, SelectionMode::topk, 0);
    CHECK(select(plan).retained == std::vector<std::size_t>{1});

    const std::vector<double> ties{0.5, 0.5, 0.5, 0.5, 0.2};
    CHECK(select(build_plan(ties, 0.4, SelectionMode::topk, 0)).retained == std::vector<std::size_t>{0, 1});
}

TEST_CASE("property: top-K is permutation invariant up to ties") {
    testkit::Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 20 + rng.below(50);
        const auto s = random_scores(n, 1000 + trial);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        std::vector<double> shuffled(n);
        for (std::size_t k = 0; k < n; ++k) shuffled[k] = s[perm[k]];
        const auto a = select(build_plan(s, 0.3, SelectionMode::topk, 0)).retained;
        auto b = select(build_plan(shuffled, 0.3, SelectionMode::topk, 0)).retained;
        for (auto& i : b) i = perm[i];
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("property: exact size and determinism in every stochastic mode") {
    for (auto mode : {SelectionMode::pivotal, SelectionMode::multinomial}) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const std::size_t n = 5 + seed % 97;
            const auto s = random_scores(n, seed, 1e-4, 1.0);
            const double gamma = 0.05 + 0.9 * static_cast<double>(seed % 13) / 12.0;
            if (retention_budget(gamma, n) == 0) continue;
            const auto plan = build_plan(s, gamma, mode, seed);
            const auto a = select(plan);
            check_partition(a, n, plan.budget);
            const auto b = select(build_plan(s, gamma, mode, seed));
            CHECK(a.retained == b.retained);
        }
    }
}

TEST_CASE("property: scale invariance under a fixed seed") {
    const auto s = random_scores(60, 77);
    for (double c : {4.0, 0.125, 3.7}) {
        std::vector<double> scaled(s);
        for (auto& v : scaled) v *= c;
        for (auto mode : {SelectionMode::pivotal, SelectionMode::topk}) {
            for (std::uint64_t seed = 0; seed < 20; ++seed)
                CHECK(select(build_plan(s, 0.2, mode, seed)).retained ==
                      select(build_plan(scaled, 0.2, mode, seed)).retained);
        }
        if (c == 4.0 || c == 0.125) {
            // Power-of-two scaling is exact, so the multinomial draws match too.
            for (std::uint64_t seed = 0; seed < 20; ++seed)
                CHECK(select(build_plan(s, 0.2, SelectionMode::multinomial, seed)).retained ==
                      select(build_plan(scaled, 0.2, SelectionMode::multinomial, seed)).retained);
        }
    }
}

TEST_CASE("pivotal inclusion frequencies match pi") {
    const auto s = random_scores(30, 2024, 0.05, 1.0);
    const auto plan0 = build_plan(s, 0.2, SelectionMode::pivotal, 0);
    const int runs = 5000;
    std::vector<int> hits(30, 0);
    for (int r = 0; r < runs; ++r) {
        auto plan = plan0;
        plan.seed = 1000 + r;
        for (std::size_t i : select(plan).retained) ++hits[i];
    }
    for (std::size_t i = 0; i < 30; ++i) {
        const double p = plan0.inclusion_prob[i];
        const double sd = std::sqrt(runs * p * (1 - p));
        CHECK(std::abs(hits[i] - runs * p) <= 4.0 * sd + 1e-9);
    }
}

TEST_CASE("pivotal handles certain and impossible units") {
    // pi = (1, 0.5, 0.5, 0, 1): units 0 and 4 always in, unit 3 never.
    const std::vector<double> s{1.0, 0.5, 0.5, 0.0, 1.0};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SelectionPlan plan;
        plan.budget = 3;
        plan.scores = s;
        plan.inclusion_prob = {1.0, 0.5, 0.5, 0.0, 1.0};
        plan.seed = seed;
        const auto sel = select(plan);
        REQUIRE(sel.retained.size() == 3);
        CHECK(sel.retained.front() == 0);
        CHECK(sel.retained.back() == 4);
        CHECK(std::find(sel.retained.begin(), sel.retained.end(), 3) == sel.retained.end());
    }
}

TEST_CASE("multinomial inclusion matches the enumerated two-draw oracle") {
    // Two sequential draws without replacement: P(i) = p_i + sum_{j != i} p_j p_i / (1 - p_j).
    const std::vector<double> s{0.5, 0.2, 0.15, 0.1, 0.05};
    std::vector<double> want(5, 0.0);
    for (std::size_t i = 0; i < 5; ++i) {
        want[i] = s[i];
        for (std::size_t j = 0; j < 5; ++j)
            if (j != i) want[i] += s[j] * s[i] / (1.0 - s[j]);
    }
    const int runs = 20000;
    std::vector<int> hits(5, 0);
    for (int r = 0; r < runs; ++r)
        for (std::size_t i : select(build_plan(s, 0.4, SelectionMode::multinomial, r)).retained) ++hits[i];
    for (std::size_t i = 0; i < 5; ++i) {
        const double sd = std::sqrt(runs * want[i] * (1 - want[i]));
        CHECK(std::abs(hits[i] - runs * want[i]) <= 4.0 * sd);
    }
}

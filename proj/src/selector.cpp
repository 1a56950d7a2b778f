#include "kitoke/selector.hpp"

#include "kitoke/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace kitoke {

namespace {

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

Selection from_flags(const std::vector<char>& chosen) {
    Selection sel;
    for (std::size_t i = 0; i < chosen.size(); ++i) (chosen[i] ? sel.retained : sel.discarded).push_back(i);
    return sel;
}

// Deville-Tille ordered pivotal method. A single "open" unit carries a
// fractional probability; each new unit duels with it until one of the two
// is decided (0 or 1).
std::vector<char> pivotal(std::span<const double> pi, std::uint64_t seed) {
    constexpr double snap = 1e-12;
    Uniform uniform(seed);
    std::vector<char> chosen(pi.size(), 0);
    bool open = false;
    std::size_t holder = 0;
    double mass = 0.0;

    for (std::size_t j = 0; j < pi.size(); ++j) {
        const double p = pi[j];
        if (p <= 0.0) continue;
        if (!open) {
            open = true;
            holder = j;
            mass = p;
        } else {
            const double sum = mass + p;
            if (sum < 1.0) {
                if (uniform() < p / sum) holder = j;
                mass = sum;
            } else {
                const double rest = sum - 1.0;
                if (uniform() < (1.0 - p) / (2.0 - sum)) {
                    chosen[holder] = 1;
                    holder = j;
                } else {
                    chosen[j] = 1;
                }
                mass = rest;
            }
        }
        if (mass >= 1.0 - snap) {
            chosen[holder] = 1;
            open = false;
            mass = 0.0;
        } else if (mass <= snap) {
            open = false;
            mass = 0.0;
        }
    }
    // Sum(pi) = K up to rounding, so a leftover open unit holds ~0 or ~1.
    if (open && mass > 0.5) chosen[holder] = 1;
    return chosen;
}

// Sequential weighted draws without replacement over a Fenwick tree.
std::vector<char> multinomial(std::span<const double> scores, std::size_t budget, std::uint64_t seed) {
    const std::size_t n = scores.size();
    std::vector<double> tree(n + 1, 0.0);
    std::vector<double> weight(scores.begin(), scores.end());
    auto add = [&](std::size_t i, double delta) {
        for (std::size_t k = i + 1; k <= n; k += k & (~k + 1)) tree[k] += delta;
    };
    for (std::size_t i = 0; i < n; ++i) add(i, weight[i]);
    std::size_t top = 1;
    while (top * 2 <= n) top *= 2;

    Uniform uniform(seed);
    std::vector<char> chosen(n, 0);
    double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    for (std::size_t draw = 0; draw < budget; ++draw) {
        const double target = uniform() * total;
        // Largest prefix whose sum is <= target; the next index is drawn.
        std::size_t pos = 0;
        double prefix = 0.0;
        for (std::size_t step = top; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next <= n && prefix + tree[next] <= target) {
                pos = next;
                prefix += tree[next];
            }
        }
        std::size_t pick = std::min(pos, n - 1);
        // Guard against landing on an exhausted slot through rounding.
        while (weight[pick] <= 0.0 || chosen[pick]) {
            pick = (pick + 1) % n;
        }
        chosen[pick] = 1;
        add(pick, -weight[pick]);
        total -= weight[pick];
        weight[pick] = 0.0;
        if (total <= 0.0) {
            total = 0.0;
            for (double w : weight) total += w;
        }
    }
    return chosen;
}

std::vector<char> topk(std::span<const double> scores, std::size_t budget) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                      });
    std::vector<char> chosen(scores.size(), 0);
    for (std::size_t k = 0; k < budget; ++k) chosen[order[k]] = 1;
    return chosen;
}

} // namespace

std::vector<double> capped_inclusion_probabilities(std::span<const double> scores, std::size_t budget,
                                                   std::size_t* rounds) {
    const std::size_t n = scores.size();
    if (budget == 0) fail(ErrorKind::invalid_argument, "selection budget is zero");
    if (budget > n)
        fail(ErrorKind::invalid_argument, "budget " + std::to_string(budget) + " exceeds " +
                                              std::to_string(n) + " tokens");
    std::size_t positive = 0;
    for (double s : scores) {
        if (!std::isfinite(s) || s < 0.0)
            fail(ErrorKind::invalid_argument, "selection scores must be finite and non-negative");
        positive += s > 0.0;
    }
    if (positive == 0) fail(ErrorKind::numeric, "all selection scores are zero");
    if (positive < budget)
        fail(ErrorKind::numeric, "only " + std::to_string(positive) + " positive scores for a budget of " +
                                     std::to_string(budget));

    std::vector<double> pi(n, 0.0);
    std::vector<char> capped(n, 0);
    std::size_t n_capped = 0;
    std::size_t capping = 0;
    for (;;) {
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!capped[i]) mass += scores[i];
        const double remaining = static_cast<double>(budget - n_capped);
        bool clamped = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (capped[i]) continue;
            pi[i] = remaining * scores[i] / mass;
            if (pi[i] >= 1.0) {
                pi[i] = 1.0;
                capped[i] = 1;
                ++n_capped;
                clamped = true;
            }
        }
        if (!clamped) break;
        ++capping;
        if (n_capped == budget) {
            for (std::size_t i = 0; i < n; ++i)
                if (!capped[i]) pi[i] = 0.0;
            break;
        }
    }
    if (rounds) *rounds = capping;
    return pi;
}

SelectionPlan build_plan(std::span<const double> scores, double gamma, SelectionMode mode,
                         std::uint64_t seed) {
    SelectionPlan plan;
    plan.budget = retention_budget(gamma, scores.size());
    plan.scores.assign(scores.begin(), scores.end());
    plan.inclusion_prob = capped_inclusion_probabilities(scores, plan.budget, &plan.capping_rounds);
    plan.mode = mode;
    plan.seed = seed;
    return plan;
}

Selection select(const SelectionPlan& plan) {
    const std::size_t n = plan.size();
    if (plan.budget == 0 || plan.budget > n || plan.inclusion_prob.size() != n)
        fail(ErrorKind::invalid_argument, "inconsistent selection plan");
    if (plan.budget == n) return from_flags(std::vector<char>(n, 1));

    std::vector<char> chosen;
    switch (plan.mode) {
    case SelectionMode::pivotal: chosen = pivotal(plan.inclusion_prob, plan.seed); break;
    case SelectionMode::multinomial: chosen = multinomial(plan.scores, plan.budget, plan.seed); break;
    case SelectionMode::topk: chosen = topk(plan.scores, plan.budget); break;
    }
    auto sel = from_flags(chosen);
    if (sel.retained.size() != plan.budget)
        fail(ErrorKind::numeric, "selection produced " + std::to_string(sel.retained.size()) +
                                     " tokens for a budget of " + std::to_string(plan.budget));
    return sel;
}

} // namespace kitoke

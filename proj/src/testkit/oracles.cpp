#include "kitoke/testkit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kitoke::testkit {

namespace {

double dist2(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
        s += diff * diff;
    }
    return s;
}

double cosine(std::span<const float> a, std::span<const float> b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) ab += static_cast<double>(a[d]) * static_cast<double>(b[d]);
    for (std::size_t d = 0; d < a.size(); ++d) aa += static_cast<double>(a[d]) * static_cast<double>(a[d]);
    for (std::size_t d = 0; d < b.size(); ++d) bb += static_cast<double>(b[d]) * static_cast<double>(b[d]);
    const double na = std::sqrt(aa), nb = std::sqrt(bb);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return ab / (na * nb);
}

} // namespace

std::vector<double> oracle_density(const TensorView& tokens, double alpha) {
    const std::size_t n = tokens.tokens();
    std::vector<double> density(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) density[i] += std::exp(-dist2(tokens.token(i), tokens.token(j)) / alpha);
    return density;
}

OracleDiff oracle_diff(const TensorView& tokens) {
    OracleDiff out;
    const std::size_t m = tokens.tokens_per_frame();
    for (std::size_t t = 1; t < tokens.frames(); ++t) {
        double pos = 0.0, match = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            pos += std::sqrt(dist2(tokens.token(t, i), tokens.token(t - 1, i)));
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) best = std::min(best, std::sqrt(dist2(tokens.token(t - 1, i), tokens.token(t, j))));
            match += best;
        }
        out.pos.push_back(pos / m);
        out.match.push_back(match / m);
        out.total.push_back(pos / m + match / m);
    }
    return out;
}

OracleDeviations oracle_deviations(std::span<const double> diff, double floor) {
    OracleDeviations out;
    const std::size_t n = diff.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> abs_terms, rel_terms;
        if (k > 0) {
            abs_terms.push_back(diff[k] - diff[k - 1]);
            rel_terms.push_back((diff[k] - diff[k - 1]) / std::max(diff[k - 1], floor));
        }
        if (k + 1 < n) {
            abs_terms.push_back(diff[k] - diff[k + 1]);
            rel_terms.push_back((diff[k] - diff[k + 1]) / std::max(diff[k + 1], floor));
        }
        out.dev.push_back(abs_terms.empty() ? 0.0 : *std::max_element(abs_terms.begin(), abs_terms.end()));
        out.dev_rel.push_back(rel_terms.empty() ? 0.0 : *std::max_element(rel_terms.begin(), rel_terms.end()));
    }
    return out;
}

std::vector<std::size_t> oracle_assign(const TensorView& tokens, std::span<const std::size_t> retained,
                                       std::span<const std::size_t> frame_interval) {
    const std::size_t n = tokens.tokens();
    const std::size_t m = tokens.tokens_per_frame();
    std::vector<char> is_retained(n, 0);
    for (std::size_t r : retained) is_retained[r] = 1;
    std::vector<std::size_t> out(n);
    for (std::size_t u = 0; u < n; ++u) {
        if (is_retained[u]) {
            out[u] = u;
            continue;
        }
        const std::size_t home = frame_interval[u / m];
        bool any_local = false;
        for (std::size_t r : retained) any_local |= frame_interval[r / m] == home;
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = n;
        for (std::size_t r = 0; r < n; ++r) {
            if (!is_retained[r]) continue;
            if (any_local && frame_interval[r / m] != home) continue;
            const double c = cosine(tokens.token(u), tokens.token(r));
            if (c > best) {
                best = c;
                arg = r;
            }
        }
        out[u] = arg;
    }
    return out;
}

} // namespace kitoke::testkit

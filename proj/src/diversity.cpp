#include "kitoke/diversity.hpp"

#include "kitoke/error.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kitoke {

namespace {

constexpr std::size_t tile = 256;

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail(ErrorKind::invalid_argument, "kernel bandwidth alpha must be positive and finite");
}

} // namespace

double kernel(std::span<const float> a, std::span<const float> b, double alpha) {
    check_alpha(alpha);
    if (a.size() != b.size())
        fail(ErrorKind::invalid_argument, "kernel operands differ in length (" +
                                              std::to_string(a.size()) + " vs " +
                                              std::to_string(b.size()) + ")");
    return std::exp(-detail::squared_distance_sequential(a, b) / alpha);
}

DiversityProfile estimate_diversity(const TensorView& tokens, double alpha, const ExecOptions& exec) {
    check_alpha(alpha);
    check_finite(tokens);

    const std::size_t n = tokens.tokens();
    const std::size_t dims = tokens.dims();
    const auto x = detail::widen(tokens);
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = detail::squared_norm_sequential(tokens.token(i));

    const std::size_t blocks = (n + tile - 1) / tile;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(blocks * (blocks + 1) / 2);
    for (std::size_t bi = 0; bi < blocks; ++bi)
        for (std::size_t bj = bi; bj < blocks; ++bj) pairs.emplace_back(bi, bj);

    // partial[bi * blocks + bj][r]: contribution of block bj to row r of block bi.
    std::vector<std::vector<double>> partial(blocks * blocks);
    const double inv_alpha = 1.0 / alpha;

    parallel_for(pairs.size(), resolve_threads(exec), [&](std::size_t p) {
        const auto [bi, bj] = pairs[p];
        const std::size_t i0 = bi * tile, ni = std::min(tile, n - i0);
        const std::size_t j0 = bj * tile, nj = std::min(tile, n - j0);
        std::vector<double> g(ni * nj);
        detail::gram(x.row(i0), ni, x.row(j0), nj, dims, g.data());

        std::vector<double> rows(ni, 0.0);
        std::vector<double> cols(bi == bj ? 0 : nj, 0.0);
        for (std::size_t r = 0; r < ni; ++r) {
            const double nr = norms[i0 + r];
            double acc = 0.0;
            for (std::size_t c = 0; c < nj; ++c) {
                double k;
                if (i0 + r == j0 + c) {
                    k = 1.0;
                } else {
                    const double d2 = std::max(0.0, nr + norms[j0 + c] - 2.0 * g[r * nj + c]);
                    k = std::exp(-d2 * inv_alpha);
                }
                acc += k;
                if (bi != bj) cols[c] += k;
            }
            rows[r] = acc;
        }
        partial[bi * blocks + bj] = std::move(rows);
        if (bi != bj) partial[bj * blocks + bi] = std::move(cols);
    });

    DiversityProfile profile;
    profile.alpha = alpha;
    profile.density.assign(n, 0.0);
    profile.score.resize(n);
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        const std::size_t i0 = bi * tile, ni = std::min(tile, n - i0);
        for (std::size_t bj = 0; bj < blocks; ++bj) {
            const auto& part = partial[bi * blocks + bj];
            for (std::size_t r = 0; r < ni; ++r) profile.density[i0 + r] += part[r];
        }
    }
    for (std::size_t i = 0; i < n; ++i) profile.score[i] = 1.0 / profile.density[i];
    return profile;
}

double median_squared_distance(const TensorView& tokens, std::size_t sample) {
    const std::size_t n = tokens.tokens();
    const std::size_t s = std::min(n, std::max<std::size_t>(sample, 2));
    if (s < 2) return 0.0;
    std::vector<std::size_t> picks(s);
    for (std::size_t k = 0; k < s; ++k) picks[k] = k * n / s;

    const auto x = detail::gather(tokens, picks);
    std::vector<double> norms(s);
    for (std::size_t k = 0; k < s; ++k) norms[k] = detail::squared_norm_sequential(tokens.token(picks[k]));
    std::vector<double> g(s * s);
    detail::gram(x.values.data(), s, x.values.data(), s, tokens.dims(), g.data());

    std::vector<double> d2;
    d2.reserve(s * (s - 1) / 2);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j)
            d2.push_back(std::max(0.0, norms[i] + norms[j] - 2.0 * g[i * s + j]));
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    const double upper = d2[mid];
    if (d2.size() % 2 == 1) return upper;
    const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

Float64Table to_table(const DiversityProfile& profile) {
    Float64Table table{2, profile.size(), {}};
    table.values.reserve(2 * profile.size());
    table.values.insert(table.values.end(), profile.density.begin(), profile.density.end());
    table.values.insert(table.values.end(), profile.score.begin(), profile.score.end());
    return table;
}

void save_diversity(const DiversityProfile& profile, const std::filesystem::path& path) {
    save_table(to_table(profile), path);
}

} // namespace kitoke

#include "kitoke/cost_model.hpp"

#include "kitoke/error.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>

#ifndef KITOKE_PRESET_DIR
#define KITOKE_PRESET_DIR "data/presets"
#endif

namespace kitoke {

void CostModelSpec::validate() const {
    if (hidden_dim == 0 || ffn_dim == 0 || n_layers == 0 || kv_heads == 0 || head_dim == 0)
        fail(ErrorKind::invalid_argument, "cost model dimensions must be positive");
}

double flops_per_layer(std::uint64_t n_tokens, const CostModelSpec& spec) {
    spec.validate();
    const double n = static_cast<double>(n_tokens);
    const double d_model = static_cast<double>(spec.hidden_dim);
    const double kv_width = static_cast<double>(spec.kv_heads) * static_cast<double>(spec.head_dim);
    const double d_ffn = static_cast<double>(spec.ffn_dim);
    return 2.0 * n * d_model * kv_width + 2.0 * n * d_model * d_model + 2.0 * n * n * d_model +
           3.0 * n * d_model * d_ffn;
}

double flops(std::uint64_t n_tokens, const CostModelSpec& spec) {
    return static_cast<double>(spec.n_layers) * flops_per_layer(n_tokens, spec);
}

std::optional<std::uint64_t> flops_exact(std::uint64_t n, const CostModelSpec& spec) {
    spec.validate();
    std::uint64_t acc = 0;
    bool overflow = false;
    auto mul = [&](std::initializer_list<std::uint64_t> factors) {
        std::uint64_t p = 1;
        for (auto f : factors) overflow |= __builtin_mul_overflow(p, f, &p);
        return p;
    };
    auto add = [&](std::uint64_t v) { overflow |= __builtin_add_overflow(acc, v, &acc); };
    const auto d_model = spec.hidden_dim;
    add(mul({2, n, d_model, spec.kv_heads, spec.head_dim}));
    add(mul({2, n, d_model, d_model}));
    add(mul({2, n, n, d_model}));
    add(mul({3, n, d_model, spec.ffn_dim}));
    overflow |= __builtin_mul_overflow(acc, spec.n_layers, &acc);
    if (overflow) return std::nullopt;
    return acc;
}

CostPreset load_preset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open preset " + path.string());
    try {
        const auto doc = nlohmann::json::parse(in);
        CostPreset preset;
        preset.name = doc.value("name", path.stem().string());
        preset.source = doc.value("source", "");
        preset.spec.hidden_dim = doc.at("hidden_dim").get<std::uint64_t>();
        preset.spec.ffn_dim = doc.at("ffn_dim").get<std::uint64_t>();
        preset.spec.n_layers = doc.at("n_layers").get<std::uint64_t>();
        preset.spec.kv_heads = doc.at("kv_heads").get<std::uint64_t>();
        preset.spec.head_dim = doc.at("head_dim").get<std::uint64_t>();
        preset.spec.validate();
        return preset;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, path.string() + ": malformed preset: " + e.what());
    }
}

std::filesystem::path default_preset_dir() {
    if (const char* env = std::getenv("KITOKE_PRESET_DIR"); env && *env) return env;
    return KITOKE_PRESET_DIR;
}

CostPreset load_preset(const std::string& name, const std::filesystem::path& dir) {
    const auto path = dir / (name + ".json");
    if (!std::filesystem::exists(path))
        fail(ErrorKind::io, "unknown preset '" + name + "' (looked for " + path.string() + ")");
    return load_preset_file(path);
}

} // namespace kitoke

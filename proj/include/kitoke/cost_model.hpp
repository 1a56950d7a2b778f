#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace kitoke {

// Dimensions of a grouped-query-attention transformer with a SwiGLU FFN.
struct CostModelSpec {
    std::uint64_t hidden_dim = 0; // D
    std::uint64_t ffn_dim = 0;    // D'
    std::uint64_t n_layers = 0;   // L
    std::uint64_t kv_heads = 0;   // h_kv
    std::uint64_t head_dim = 0;   // d

    void validate() const;
    friend bool operator==(const CostModelSpec&, const CostModelSpec&) = default;
};

// Per-layer FLOPs of n visual tokens:
//   2nD(h_kv d) + 2nD^2 + 2n^2 D + 3nDD'
// (K/V projections, Q/O projections, attention scores and values, FFN).
double flops_per_layer(std::uint64_t n_tokens, const CostModelSpec& spec);
double flops(std::uint64_t n_tokens, const CostModelSpec& spec);

// Same quantity in integer arithmetic; nullopt if it overflows 64 bits.
std::optional<std::uint64_t> flops_exact(std::uint64_t n_tokens, const CostModelSpec& spec);

struct CostPreset {
    std::string name;
    std::string source;
    CostModelSpec spec;
};

CostPreset load_preset_file(const std::filesystem::path& path);
// Presets live in <dir>/<name>.json. Default dir: $KITOKE_PRESET_DIR, else the
// data/presets directory the library was built from.
std::filesystem::path default_preset_dir();
CostPreset load_preset(const std::string& name, const std::filesystem::path& dir = default_preset_dir());

} // namespace kitoke

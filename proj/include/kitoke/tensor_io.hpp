#pragma once

// KTK1 container.
//
//   offset  size  field
//   0       4     magic "KTOK"
//   4       4     u32 version (1 = token tensor, 2 = float64 table)
//   8       8     reserved, zero
//   16      12    version 1: u32 T, u32 M, u32 D
//                 version 2: u32 rows, u32 cols, u32 zero
//   28      ...   version 1: T*M*D float32, version 2: rows*cols float64
//
// All integers and floats are little-endian; payloads are row-major.

#include "kitoke/config.hpp"
#include "kitoke/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kitoke {

inline constexpr std::size_t container_header_size = 28;
inline constexpr std::uint32_t tensor_format_version = 1;
inline constexpr std::uint32_t table_format_version = 2;

std::vector<std::byte> encode_tensor(const TokenTensor& tensor);
// Errors: format (bad magic/version/header, truncated or oversized payload),
// numeric (non-finite value, reported with its element index).
TokenTensor decode_tensor(std::span<const std::byte> bytes);

void save_tensor(const TokenTensor& tensor, const std::filesystem::path& path);
TokenTensor load_tensor(const std::filesystem::path& path);

// Dense float64 table (used for diversity dumps).
struct Float64Table {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

std::vector<std::byte> encode_table(const Float64Table& table);
Float64Table decode_table(std::span<const std::byte> bytes);
void save_table(const Float64Table& table, const std::filesystem::path& path);
Float64Table load_table(const std::filesystem::path& path);

// Sidecar metadata stored next to a tensor as <name>.meta.json.
struct TensorMeta {
    std::optional<LayoutSpec> layout;
    std::map<std::string, std::string> provenance;
};

// "clip.ktk1" -> "clip.<suffix>"
std::filesystem::path sibling_path(const std::filesystem::path& tensor_path,
                                   const std::string& suffix);
std::filesystem::path meta_path(const std::filesystem::path& tensor_path);

// Returns an empty TensorMeta when no sidecar exists.
TensorMeta load_meta(const std::filesystem::path& tensor_path);
void save_meta(const TensorMeta& meta, const std::filesystem::path& tensor_path);

std::vector<std::byte> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);

} // namespace kitoke

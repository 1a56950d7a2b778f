#include "kitoke/tensor_io.hpp"

#include "kitoke/error.hpp"

#include "json.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace kitoke {

namespace {

constexpr char magic[4] = {'K', 'T', 'O', 'K'};

template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::byte raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(raw[k], raw[sizeof(T) - 1 - k]);
    out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get_le(std::span<const std::byte> bytes, std::size_t offset) {
    std::byte raw[sizeof(T)];
    std::memcpy(raw, bytes.data() + offset, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(raw[k], raw[sizeof(T) - 1 - k]);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
}

void put_header(std::vector<std::byte>& out, std::uint32_t version, std::uint32_t a,
                std::uint32_t b, std::uint32_t c) {
    for (char ch : magic) out.push_back(static_cast<std::byte>(ch));
    put_le<std::uint32_t>(out, version);
    put_le<std::uint64_t>(out, 0);
    put_le<std::uint32_t>(out, a);
    put_le<std::uint32_t>(out, b);
    put_le<std::uint32_t>(out, c);
}

struct Header {
    std::uint32_t a, b, c;
};

Header read_header(std::span<const std::byte> bytes, std::uint32_t expected_version) {
    if (bytes.size() < container_header_size)
        fail(ErrorKind::format, "file too short for container header (" +
                                    std::to_string(bytes.size()) + " bytes)");
    if (std::memcmp(bytes.data(), magic, 4) != 0) fail(ErrorKind::format, "bad magic, expected KTOK");
    const auto version = get_le<std::uint32_t>(bytes, 4);
    if (version != expected_version)
        fail(ErrorKind::format, "unsupported container version " + std::to_string(version) +
                                    ", expected " + std::to_string(expected_version));
    if (get_le<std::uint64_t>(bytes, 8) != 0) fail(ErrorKind::format, "reserved header bytes are not zero");
    return {get_le<std::uint32_t>(bytes, 16), get_le<std::uint32_t>(bytes, 20),
            get_le<std::uint32_t>(bytes, 24)};
}

void check_payload(std::size_t have, std::size_t count, std::size_t elem) {
    const std::size_t need = count * elem;
    if (have < need)
        fail(ErrorKind::format, "truncated payload: " + std::to_string(have / elem) + " of " +
                                    std::to_string(count) + " values present");
    if (have > need)
        fail(ErrorKind::format, "payload has " + std::to_string(have - need) + " trailing bytes");
}

std::uint32_t to_u32(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max())
        fail(ErrorKind::invalid_argument, std::string(what) + " exceeds the u32 header field");
    return static_cast<std::uint32_t>(v);
}

} // namespace

std::vector<std::byte> encode_tensor(const TokenTensor& tensor) {
    std::vector<std::byte> out;
    out.reserve(container_header_size + tensor.data().size() * sizeof(float));
    put_header(out, tensor_format_version, to_u32(tensor.frames(), "T"),
               to_u32(tensor.tokens_per_frame(), "M"), to_u32(tensor.dims(), "D"));
    for (float v : tensor.data()) put_le<float>(out, v);
    return out;
}

TokenTensor decode_tensor(std::span<const std::byte> bytes) {
    const auto h = read_header(bytes, tensor_format_version);
    if (h.a == 0 || h.b == 0 || h.c == 0)
        fail(ErrorKind::format, "header extents must be positive");
    const TensorShape shape{h.a, h.b, h.c};
    const auto payload = bytes.subspan(container_header_size);
    check_payload(payload.size(), shape.elements(), sizeof(float));
    std::vector<float> data(shape.elements());
    for (std::size_t k = 0; k < data.size(); ++k) {
        data[k] = get_le<float>(payload, k * sizeof(float));
        if (!std::isfinite(data[k]))
            fail(ErrorKind::numeric, "non-finite value at element " + std::to_string(k) +
                                         " (token " + std::to_string(k / shape.dims) + ")");
    }
    return TokenTensor(shape, std::move(data));
}

std::vector<std::byte> encode_table(const Float64Table& table) {
    if (table.values.size() != table.rows * table.cols)
        fail(ErrorKind::invalid_argument, "table value count does not match rows*cols");
    std::vector<std::byte> out;
    out.reserve(container_header_size + table.values.size() * sizeof(double));
    put_header(out, table_format_version, to_u32(table.rows, "rows"), to_u32(table.cols, "cols"), 0);
    for (double v : table.values) put_le<double>(out, v);
    return out;
}

Float64Table decode_table(std::span<const std::byte> bytes) {
    const auto h = read_header(bytes, table_format_version);
    if (h.c != 0) fail(ErrorKind::format, "reserved table header field is not zero");
    Float64Table table{h.a, h.b, {}};
    const auto payload = bytes.subspan(container_header_size);
    check_payload(payload.size(), table.rows * table.cols, sizeof(double));
    table.values.resize(table.rows * table.cols);
    for (std::size_t k = 0; k < table.values.size(); ++k)
        table.values[k] = get_le<double>(payload, k * sizeof(double));
    return table;
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::byte> bytes(size);
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size)))
        fail(ErrorKind::io, "failed reading " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

void save_tensor(const TokenTensor& tensor, const std::filesystem::path& path) {
    write_file(path, encode_tensor(tensor));
}

TokenTensor load_tensor(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_tensor(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void save_table(const Float64Table& table, const std::filesystem::path& path) {
    write_file(path, encode_table(table));
}

Float64Table load_table(const std::filesystem::path& path) { return decode_table(read_file(path)); }

std::filesystem::path sibling_path(const std::filesystem::path& tensor_path, const std::string& suffix) {
    auto stem = tensor_path;
    if (stem.extension() == ".ktk1") stem.replace_extension();
    return stem.string() + "." + suffix;
}

std::filesystem::path meta_path(const std::filesystem::path& tensor_path) {
    return sibling_path(tensor_path, "meta.json");
}

TensorMeta load_meta(const std::filesystem::path& tensor_path) {
    TensorMeta meta;
    const auto path = meta_path(tensor_path);
    if (!std::filesystem::exists(path)) return meta;
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    try {
        const auto doc = nlohmann::json::parse(in);
        if (auto it = doc.find("layout"); it != doc.end() && !it->is_null()) {
            LayoutSpec layout;
            layout.rows_per_frame = it->at("rows_per_frame").get<std::size_t>();
            layout.cols_per_row = it->at("cols_per_row").get<std::size_t>();
            layout.newline_after_row = it->value("newline_after_row", true);
            meta.layout = layout;
        }
        if (auto it = doc.find("provenance"); it != doc.end())
            meta.provenance = it->get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, path.string() + ": malformed sidecar: " + e.what());
    }
    return meta;
}

void save_meta(const TensorMeta& meta, const std::filesystem::path& tensor_path) {
    nlohmann::json doc;
    if (meta.layout) {
        doc["layout"] = {{"rows_per_frame", meta.layout->rows_per_frame},
                         {"cols_per_row", meta.layout->cols_per_row},
                         {"newline_after_row", meta.layout->newline_after_row}};
    }
    if (!meta.provenance.empty()) doc["provenance"] = meta.provenance;
    const auto path = meta_path(tensor_path);
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

} // namespace kitoke

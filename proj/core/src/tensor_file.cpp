#include "hopls/errors.hpp"
#include "hopls/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace hopls {

namespace {

constexpr std::string_view kMagic = "TEN1";

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        std::uint64_t out = 0;
        for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return out;
    }
}

std::size_t parse_size(std::string_view token, const char* what) {
    std::size_t value = 0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end || token.empty()) {
        throw FormatError(std::string("tensor header: bad ") + what + " '" + std::string(token) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw FormatError("error reading '" + path.string() + "'");
    return bytes;
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("error writing '" + path.string() + "'");
}

}  // namespace

std::string encode_tensor(const DenseTensor& t) {
    std::ostringstream header;
    header << kMagic << ' ' << t.order() << ' ';
    for (std::size_t k = 0; k < t.order(); ++k) header << (k ? "," : "") << t.shape()[k];
    header << " f64 row-major\n";
    std::string out = header.str();
    const std::size_t offset = out.size();
    out.resize(offset + 8 * t.numel());
    const auto data = t.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::uint64_t le = to_little_endian(std::bit_cast<std::uint64_t>(data[i]));
        std::memcpy(out.data() + offset + 8 * i, &le, 8);
    }
    return out;
}

DenseTensor decode_tensor(std::string_view bytes) {
    const std::size_t newline = bytes.find('\n');
    if (newline == std::string_view::npos) throw FormatError("tensor file: missing header line");
    const auto fields = split(bytes.substr(0, newline), ' ');
    if (fields.size() != 5) throw FormatError("tensor header: expected 5 fields, got " + std::to_string(fields.size()));
    if (fields[0] != kMagic) throw FormatError("tensor header: bad magic '" + std::string(fields[0]) + "'");
    if (fields[3] != "f64") throw FormatError("tensor header: unsupported dtype '" + std::string(fields[3]) + "'");
    if (fields[4] != "row-major") throw FormatError("tensor header: unsupported layout '" + std::string(fields[4]) + "'");

    const std::size_t order = parse_size(fields[1], "order");
    const auto dim_tokens = split(fields[2], ',');
    if (order == 0 || dim_tokens.size() != order) throw FormatError("tensor header: order does not match dims");
    std::vector<std::size_t> dims;
    for (auto tok : dim_tokens) dims.push_back(parse_size(tok, "dim"));

    Shape shape = [&] {
        try {
            return Shape(dims);
        } catch (const DimensionError& e) {
            throw FormatError(std::string("tensor header: ") + e.what());
        }
    }();
    const std::string_view payload = bytes.substr(newline + 1);
    if (payload.size() != 8 * shape.numel()) {
        throw FormatError("tensor payload has " + std::to_string(payload.size()) + " bytes, expected " +
                          std::to_string(8 * shape.numel()));
    }
    std::vector<double> data(shape.numel());
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint64_t le = 0;
        std::memcpy(&le, payload.data() + 8 * i, 8);
        data[i] = std::bit_cast<double>(to_little_endian(le));
    }
    try {
        return DenseTensor(std::move(shape), std::move(data));
    } catch (const NumericalError& e) {
        throw FormatError(std::string("tensor payload: ") + e.what());
    }
}

void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t) { write_all(path, encode_tensor(t)); }

DenseTensor read_tensor_file(const std::filesystem::path& path) {
    try {
        return decode_tensor(read_all(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// Shared with model_file.cpp.
std::string read_file_bytes(const std::filesystem::path& path) { return read_all(path); }
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) { write_all(path, bytes); }

}  // namespace hopls

#include "odt/detail/raw_io.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "odt/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace odt::detail {

bool host_is_little_endian() {
    return std::endian::native == std::endian::little;
}

void write_header_payload(const std::string& path, const json& header,
                          const std::vector<float>& payload) {
    if (!host_is_little_endian())
        throw IoError("big-endian hosts are not supported by the file writer");
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        const std::string head = header.dump() + "\n";
        out.write(head.data(), static_cast<std::streamsize>(head.size()));
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size() * sizeof(float)));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename failed: " + target.string() + ": " + ec.message());
}

json read_header_payload(const std::string& path, std::vector<float>& payload) {
    if (!host_is_little_endian())
        throw IoError("big-endian hosts are not supported by the file reader");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string head;
    if (!std::getline(in, head)) throw FormatError("missing header line: " + path);
    json h;
    try {
        h = json::parse(head);
    } catch (const json::exception& e) {
        throw FormatError("malformed JSON header in " + path + ": " + e.what());
    }
    const auto data_start = in.tellg();
    in.seekg(0, std::ios::end);
    const auto bytes = in.tellg() - data_start;
    if (bytes < 0 || bytes % sizeof(float) != 0)
        throw FormatError("payload size is not a multiple of 4 bytes: " + path);
    payload.resize(static_cast<std::size_t>(bytes) / sizeof(float));
    in.seekg(data_start);
    in.read(reinterpret_cast<char*>(payload.data()), bytes);
    if (!in) throw IoError("read failed: " + path);
    return h;
}

void check_common_header(const json& h, const std::string& expected_format) {
    if (!h.contains("format") || h["format"] != expected_format)
        throw FormatError("expected format '" + expected_format + "'");
    if (!h.contains("version") || !h["version"].is_number_integer() ||
        h["version"].get<int>() != 1)
        throw FormatError("unknown format version");
    if (!h.contains("endianness") || h["endianness"] != "little")
        throw FormatError("unsupported endianness tag");
}

}  // namespace odt::detail

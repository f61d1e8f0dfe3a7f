#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace odt::detail {

// Shared low-level pieces of the header + float32-payload container.

bool host_is_little_endian();

// Serializes the header (sorted keys, single line) and writes header +
// payload via a temp file renamed into place.
void write_header_payload(const std::string& path, const nlohmann::json& header,
                          const std::vector<float>& payload);

// Reads and parses the header line, returns remaining bytes as float32s.
nlohmann::json read_header_payload(const std::string& path, std::vector<float>& payload);

// Validates the fixed header fields shared by every format.
void check_common_header(const nlohmann::json& h, const std::string& expected_format);

}  // namespace odt::detail

#pragma once

#include <stdexcept>
#include <string>

namespace odt {

// Error categories map 1:1 onto CLI exit codes (see tools/).
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Malformed file contents (bad header, payload mismatch, unknown version).
struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Numerical degeneracy (clamp overflow, low SNR, zero amplitude, ...).
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace odt

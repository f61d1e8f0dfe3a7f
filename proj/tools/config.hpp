#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odt/darkfield.hpp"
#include "odt/phantom.hpp"
#include "odt/tomography.hpp"
#include "odt/types.hpp"

namespace odt::cli {

// One value from the declarative run config. The accepted grammar is a
// TOML subset: [section] headers, key = value pairs, '#' comments,
// double-quoted strings, booleans, numbers, and flat number arrays.
struct ConfigValue {
    enum class Kind { String, Number, Bool, NumberArray };
    Kind kind = Kind::Number;
    std::string str;
    double num = 0;
    bool boolean = false;
    std::vector<double> array;
};

// Flat "section.key" -> value map in file order.
using ConfigMap = std::map<std::string, ConfigValue>;

// Parses config text; malformed lines, duplicate keys, or keys outside a
// section throw ConfigError.
ConfigMap parse_config_text(const std::string& text);

// Reads and parses a config file, then applies "section.key=value"
// overrides (values use the same grammar as file values).
ConfigMap load_config(const std::string& path, const std::vector<std::string>& overrides);

struct IlluminationConfig {
    IlluminationPattern pattern = IlluminationPattern::CircularScan;
    int count = 49;
    double na_fraction = 0.95;
};

struct CtfConfig {
    Modality modality = Modality::ODT;
    double epsilon = 0;  // cycles/um; <= 0 selects one frequency bin
    std::optional<double> cutoff;
};

struct HolographyConfig {
    std::array<double, 2> tilt{0, 0};  // carrier, cycles/um
    double ref_amplitude = 1.0;
};

struct NoiseConfig {
    std::uint64_t seed = 0;
    double sigma = 0.01;  // Gaussian amplitude noise relative to frame RMS
};

struct SliceConfig {
    std::string plane = "XY";
    int index = 0;
};

struct RunConfig {
    OpticalConfig optical;
    std::optional<GridSpec> grid;

    const GridSpec& require_grid() const {
        if (!grid) throw ConfigError("this command requires a [grid] section");
        return *grid;
    }
    std::optional<PhantomSpec> phantom;
    IlluminationConfig illumination;
    GpConfig gp;
    std::optional<FilterSpec> filter;
    std::optional<CtfConfig> ctf;
    std::optional<HolographyConfig> holography;
    std::optional<NoiseConfig> noise;
    std::optional<SliceConfig> slice;
    int parallelism = 1;
};

// Builds the typed config; every key must be consumed or the build throws
// ConfigError naming the unknown key.
RunConfig build_run_config(const ConfigMap& map);

// FNV-1a 64-bit hash, rendered as 16 hex digits; used for manifest hashes.
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::string& path);

}  // namespace odt::cli

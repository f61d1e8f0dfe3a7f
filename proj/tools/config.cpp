#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "odt/errors.hpp"

namespace odt::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Removes a trailing comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& text, int line_no) {
    double value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("config line " + std::to_string(line_no) + ": bad number '" +
                          text + "'");
    return value;
}

ConfigValue parse_value(const std::string& raw, int line_no) {
    const std::string text = trim(raw);
    if (text.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": missing value");
    ConfigValue v;
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unterminated string");
        v.kind = ConfigValue::Kind::String;
        v.str = text.substr(1, text.size() - 2);
        return v;
    }
    if (text == "true" || text == "false") {
        v.kind = ConfigValue::Kind::Bool;
        v.boolean = (text == "true");
        return v;
    }
    if (text.front() == '[') {
        if (text.back() != ']')
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unterminated array");
        v.kind = ConfigValue::Kind::NumberArray;
        std::string inner = text.substr(1, text.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": empty array element");
            v.array.push_back(parse_number(item, line_no));
        }
        return v;
    }
    v.kind = ConfigValue::Kind::Number;
    v.num = parse_number(text, line_no);
    return v;
}

bool valid_key_part(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap map;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key_part(section))
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": bad section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key_part(key))
            throw ConfigError("config line " + std::to_string(line_no) + ": bad key '" +
                              key + "'");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside any [section]");
        const std::string full = section + "." + key;
        if (map.count(full))
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": duplicate key '" + full + "'");
        map[full] = parse_value(line.substr(eq + 1), line_no);
    }
    return map;
}

ConfigMap load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    ConfigMap map = parse_config_text(text);
    for (const std::string& ov : overrides) {
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must be section.key=value: " + ov);
        const std::string key = trim(ov.substr(0, eq));
        if (key.find('.') == std::string::npos)
            throw ConfigError("override key must be section.key: " + ov);
        map[key] = parse_value(ov.substr(eq + 1), 0);
    }
    return map;
}

namespace {

// Tracks consumed keys so leftovers can be rejected by name.
class Reader {
  public:
    explicit Reader(const ConfigMap& map) : map_(map) {}

    bool has_section(const std::string& section) const {
        const std::string prefix = section + ".";
        auto it = map_.lower_bound(prefix);
        return it != map_.end() && it->first.rfind(prefix, 0) == 0;
    }

    const ConfigValue* find(const std::string& key) {
        auto it = map_.find(key);
        if (it == map_.end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }

    double number(const std::string& key, double fallback) {
        const ConfigValue* v = find(key);
        if (!v) return fallback;
        if (v->kind != ConfigValue::Kind::Number)
            throw ConfigError("config key '" + key + "' must be a number");
        return v->num;
    }

    double required_number(const std::string& key) {
        const ConfigValue* v = find(key);
        if (!v) throw ConfigError("missing required config key '" + key + "'");
        if (v->kind != ConfigValue::Kind::Number)
            throw ConfigError("config key '" + key + "' must be a number");
        return v->num;
    }

    int integer(const std::string& key, int fallback) {
        const double d = number(key, fallback);
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d)
            throw ConfigError("config key '" + key + "' must be an integer");
        return i;
    }

    bool flag(const std::string& key, bool fallback) {
        const ConfigValue* v = find(key);
        if (!v) return fallback;
        if (v->kind != ConfigValue::Kind::Bool)
            throw ConfigError("config key '" + key + "' must be true or false");
        return v->boolean;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const ConfigValue* v = find(key);
        if (!v) return fallback;
        if (v->kind != ConfigValue::Kind::String)
            throw ConfigError("config key '" + key + "' must be a string");
        return v->str;
    }

    std::vector<double> numbers(const std::string& key, std::size_t expected) {
        const ConfigValue* v = find(key);
        if (!v) throw ConfigError("missing required config key '" + key + "'");
        if (v->kind != ConfigValue::Kind::NumberArray)
            throw ConfigError("config key '" + key + "' must be a number array");
        if (expected != 0 && v->array.size() != expected)
            throw ConfigError("config key '" + key + "' must have " +
                              std::to_string(expected) + " elements");
        return v->array;
    }

    void reject_unused() const {
        for (const auto& [key, value] : map_)
            if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

  private:
    const ConfigMap& map_;
    std::set<std::string> used_;
};

PhantomSpec read_phantom(Reader& r, double default_n_medium) {
    PhantomSpec spec;
    spec.n_medium = r.number("phantom.n_medium", default_n_medium);
    const std::string type = r.text("phantom.type", "sphere");
    if (type == "sphere") {
        SpherePhantom s;
        if (r.find("phantom.center") == nullptr) {
            s.center = {0, 0, 0};
        } else {
            // re-read through the typed accessor for shape validation
            const auto c = r.numbers("phantom.center", 3);
            s.center = {c[0], c[1], c[2]};
        }
        s.radius = r.required_number("phantom.radius");
        s.n_inside = r.required_number("phantom.n_inside");
        spec.variant = s;
    } else if (type == "shepp_logan") {
        SheppLogan3D s;
        s.scale = r.required_number("phantom.scale");
        s.n_background = r.number("phantom.n_background", spec.n_medium);
        s.contrast = r.required_number("phantom.contrast");
        spec.variant = s;
    } else if (type == "deltas") {
        DeltaPhantom d;
        const auto pos = r.numbers("phantom.positions", 0);
        const auto val = r.numbers("phantom.values", 0);
        if (pos.size() != 3 * val.size())
            throw ConfigError("phantom.positions must hold 3 numbers per value");
        for (std::size_t i = 0; i < val.size(); ++i)
            d.deltas.push_back({{pos[3 * i], pos[3 * i + 1], pos[3 * i + 2]}, val[i]});
        spec.variant = d;
    } else {
        throw ConfigError("phantom.type must be sphere, shepp_logan, or deltas");
    }
    return spec;
}

IlluminationPattern pattern_from_string(const std::string& s) {
    if (s == "normal") return IlluminationPattern::Normal;
    if (s == "circular_scan") return IlluminationPattern::CircularScan;
    if (s == "spiral_scan") return IlluminationPattern::SpiralScan;
    throw ConfigError("illumination.pattern must be normal, circular_scan, or spiral_scan");
}

Modality modality_from_string(const std::string& s) {
    if (s == "bright_field") return Modality::BrightField;
    if (s == "dark_field") return Modality::DarkField;
    if (s == "qpi") return Modality::QPI;
    if (s == "odt") return Modality::ODT;
    if (s == "dark_field_odt") return Modality::DarkFieldODT;
    throw ConfigError("ctf.modality must be one of bright_field, dark_field, qpi, odt, "
                      "dark_field_odt");
}

}  // namespace

RunConfig build_run_config(const ConfigMap& map) {
    Reader r(map);
    RunConfig cfg;

    cfg.optical.wavelength_vacuum = r.number("optical.wavelength_vacuum", 0.532);
    cfg.optical.n_medium = r.number("optical.n_medium", 1.337);
    cfg.optical.na_condenser = r.number("optical.na_condenser", 1.2);
    cfg.optical.na_objective = r.number("optical.na_objective", 1.2);
    cfg.optical.validate();

    if (r.has_section("grid")) {
        GridSpec g;
        g.nx = static_cast<int>(r.required_number("grid.nx"));
        g.ny = static_cast<int>(r.required_number("grid.ny"));
        g.nz = static_cast<int>(r.required_number("grid.nz"));
        g.pitch = r.required_number("grid.pitch");
        g.validate();
        cfg.grid = g;
    }

    if (r.has_section("phantom"))
        cfg.phantom = read_phantom(r, cfg.optical.n_medium);

    cfg.illumination.pattern =
        pattern_from_string(r.text("illumination.pattern", "circular_scan"));
    cfg.illumination.count = r.integer("illumination.count", 49);
    cfg.illumination.na_fraction = r.number("illumination.na_fraction", 0.95);

    cfg.gp.iterations = r.integer("gp.iterations", 8);
    cfg.gp.enforce_nonnegativity = r.flag("gp.enforce_nonnegativity", true);

    if (r.has_section("filter")) {
        FilterSpec f;
        const std::string shape = r.text("filter.shape", "gaussian");
        if (shape == "step")
            f.shape = FilterShape::Step;
        else if (shape == "gaussian")
            f.shape = FilterShape::Gaussian;
        else
            throw ConfigError("filter.shape must be step or gaussian");
        f.cutoff = r.required_number("filter.cutoff");
        const std::string unit = r.text("filter.unit", "cycles_per_um");
        if (unit == "cycles_per_um")
            f.unit = FilterSpec::Unit::CyclesPerUm;
        else if (unit == "inverse_fov")
            f.unit = FilterSpec::Unit::InverseFov;
        else
            throw ConfigError("filter.unit must be cycles_per_um or inverse_fov");
        cfg.filter = f;
    }

    if (r.has_section("ctf")) {
        CtfConfig c;
        c.modality = modality_from_string(r.text("ctf.modality", "odt"));
        c.epsilon = r.number("ctf.epsilon", 0.0);
        if (const ConfigValue* v = r.find("ctf.cutoff")) {
            if (v->kind != ConfigValue::Kind::Number)
                throw ConfigError("config key 'ctf.cutoff' must be a number");
            c.cutoff = v->num;
        }
        cfg.ctf = c;
    }

    if (r.has_section("holography")) {
        HolographyConfig h;
        const auto tilt = r.numbers("holography.tilt", 2);
        h.tilt = {tilt[0], tilt[1]};
        h.ref_amplitude = r.number("holography.ref_amplitude", 1.0);
        if (!(h.ref_amplitude > 0))
            throw ConfigError("holography.ref_amplitude must be positive");
        cfg.holography = h;
    }

    if (r.has_section("noise")) {
        NoiseConfig n;
        const double seed = r.required_number("noise.seed");
        if (seed < 0 || seed != std::floor(seed))
            throw ConfigError("noise.seed must be a non-negative integer");
        n.seed = static_cast<std::uint64_t>(seed);
        n.sigma = r.number("noise.sigma", 0.01);
        if (!(n.sigma >= 0)) throw ConfigError("noise.sigma must be >= 0");
        cfg.noise = n;
    }

    if (r.has_section("slice")) {
        SliceConfig s;
        s.plane = r.text("slice.plane", "XY");
        if (s.plane != "XY" && s.plane != "XZ" && s.plane != "YZ")
            throw ConfigError("slice.plane must be XY, XZ, or YZ");
        s.index = r.integer("slice.index", 0);
        cfg.slice = s;
    }

    cfg.parallelism = r.integer("run.parallelism", 1);
    if (cfg.parallelism < 1) throw ConfigError("run.parallelism must be >= 1");

    r.reject_unused();
    return cfg;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for hashing: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    return fnv1a_hex(bytes);
}

}  // namespace odt::cli

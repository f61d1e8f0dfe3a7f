#include "odt/io.hpp"

#include <json.hpp>

#include "odt/detail/raw_io.hpp"

using nlohmann::json;

namespace odt {
namespace {

json grid_header(const char* format, const GridSpec& g) {
    return json{{"format", format},
                {"version", 1},
                {"endianness", "little"},
                {"dtype", "f32"},
                {"nx", g.nx},
                {"ny", g.ny},
                {"nz", g.nz},
                {"pitch_um", g.pitch}};
}

GridSpec grid_from_header(const json& h) {
    for (const char* key : {"nx", "ny", "nz", "pitch_um"})
        if (!h.contains(key)) throw FormatError(std::string("header missing key: ") + key);
    GridSpec g;
    g.nx = h["nx"].get<int>();
    g.ny = h["ny"].get<int>();
    g.nz = h["nz"].get<int>();
    g.pitch = h["pitch_um"].get<double>();
    g.validate();
    return g;
}

}  // namespace

void write_volume(const std::string& path, const Volume3D& vol) {
    vol.validate();
    json h = grid_header("odt-volume", vol.grid);
    h["kind"] = to_string(vol.kind);
    std::vector<float> payload(vol.values.size());
    for (std::size_t i = 0; i < vol.values.size(); ++i)
        payload[i] = static_cast<float>(vol.values[i]);
    detail::write_header_payload(path, h, payload);
}

Volume3D read_volume(const std::string& path) {
    std::vector<float> payload;
    json h = detail::read_header_payload(path, payload);
    detail::check_common_header(h, "odt-volume");
    Volume3D vol;
    vol.grid = grid_from_header(h);
    if (!h.contains("kind")) throw FormatError("volume header missing kind");
    vol.kind = volume_kind_from_string(h["kind"].get<std::string>());
    if (payload.size() != vol.grid.voxel_count())
        throw FormatError("volume payload length does not match declared dims");
    vol.values.assign(payload.begin(), payload.end());
    vol.validate();
    return vol;
}

void write_spectrum(const std::string& path, const Spectrum3D& spec) {
    spec.validate();
    json h = grid_header("odt-spectrum", spec.grid);
    h["dtype"] = "c64f32+f32";  // interleaved re/im, then weights
    const std::size_t n = spec.values.size();
    std::vector<float> payload(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        payload[2 * i] = static_cast<float>(spec.values[i].real());
        payload[2 * i + 1] = static_cast<float>(spec.values[i].imag());
    }
    for (std::size_t i = 0; i < n; ++i)
        payload[2 * n + i] = static_cast<float>(spec.weights[i]);
    detail::write_header_payload(path, h, payload);
}

Spectrum3D read_spectrum(const std::string& path) {
    std::vector<float> payload;
    json h = detail::read_header_payload(path, payload);
    detail::check_common_header(h, "odt-spectrum");
    Spectrum3D spec;
    spec.grid = grid_from_header(h);
    const std::size_t n = spec.grid.voxel_count();
    if (payload.size() != 3 * n)
        throw FormatError("spectrum payload length does not match declared dims");
    spec.values.resize(n);
    spec.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        spec.values[i] = cplx(payload[2 * i], payload[2 * i + 1]);
    for (std::size_t i = 0; i < n; ++i) spec.weights[i] = payload[2 * n + i];
    spec.validate();
    return spec;
}

void write_field_stack(const std::string& path, const std::vector<ComplexField2D>& fields) {
    if (fields.empty()) throw ConfigError("cannot write an empty field stack");
    const int nx = fields[0].nx, ny = fields[0].ny;
    const double pitch = fields[0].pitch;
    json frames = json::array();
    for (const auto& f : fields) {
        if (f.nx != nx || f.ny != ny || f.pitch != pitch)
            throw ConfigError("field stack frames must share dims and pitch");
        if (f.values.size() != static_cast<std::size_t>(nx) * ny)
            throw FormatError("field payload length does not match dims");
        frames.push_back(json{{"k_illum", {f.k_illum[0], f.k_illum[1], f.k_illum[2]}}});
    }
    json h{{"format", "odt-fields"}, {"version", 1},      {"endianness", "little"},
           {"dtype", "c64f32"},      {"nx", nx},          {"ny", ny},
           {"pitch_um", pitch},      {"frames", frames}};
    const std::size_t per = static_cast<std::size_t>(nx) * ny;
    std::vector<float> payload;
    payload.reserve(2 * per * fields.size());
    for (const auto& f : fields)
        for (const auto& v : f.values) {
            payload.push_back(static_cast<float>(v.real()));
            payload.push_back(static_cast<float>(v.imag()));
        }
    detail::write_header_payload(path, h, payload);
}

std::vector<ComplexField2D> read_field_stack(const std::string& path) {
    std::vector<float> payload;
    json h = detail::read_header_payload(path, payload);
    detail::check_common_header(h, "odt-fields");
    for (const char* key : {"nx", "ny", "pitch_um", "frames"})
        if (!h.contains(key)) throw FormatError(std::string("header missing key: ") + key);
    const int nx = h["nx"].get<int>(), ny = h["ny"].get<int>();
    const double pitch = h["pitch_um"].get<double>();
    const auto& frames = h["frames"];
    if (!frames.is_array() || frames.empty())
        throw FormatError("field stack header lists no frames");
    const std::size_t per = static_cast<std::size_t>(nx) * ny;
    if (payload.size() != 2 * per * frames.size())
        throw FormatError("field stack payload length does not match declared frames");
    std::vector<ComplexField2D> fields;
    fields.reserve(frames.size());
    std::size_t off = 0;
    for (const auto& fr : frames) {
        ComplexField2D f;
        f.nx = nx;
        f.ny = ny;
        f.pitch = pitch;
        const auto& k = fr.at("k_illum");
        f.k_illum = {k.at(0).get<double>(), k.at(1).get<double>(), k.at(2).get<double>()};
        f.values.resize(per);
        for (std::size_t i = 0; i < per; ++i) {
            f.values[i] = cplx(payload[off], payload[off + 1]);
            off += 2;
        }
        fields.push_back(std::move(f));
    }
    return fields;
}

}  // namespace odt

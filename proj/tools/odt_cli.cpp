// Batch front end for the dark-field ODT pipeline. Each subcommand is a
// thin shell over one library operation, driven by a declarative config
// file; outputs are written atomically and every run leaves a JSON
// manifest next to its primary output.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "config.hpp"
#include "odt/analysis.hpp"
#include "odt/darkfield.hpp"
#include "odt/forward.hpp"
#include "odt/holography.hpp"
#include "odt/io.hpp"
#include "odt/phantom.hpp"
#include "odt/tomography.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace odt;
using namespace odt::cli;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// Exit codes: 0 success, 2 config, 3 I/O or file format, 4 numerical
// degeneracy, 1 anything else.
enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kIo = 3, kNumeric = 4 };

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* c = cmd->add_option("-c,--config", args.config_path,
                              "declarative run config (TOML subset)");
    if (config_required) c->required();
    cmd->add_option("--set", args.overrides,
                    "override a config key: section.key=value (repeatable)");
    cmd->add_option("-o,--output", args.output, "primary output path")->required();
}

RunConfig load_run_config(const CommonArgs& args) {
    return build_run_config(load_config(args.config_path, args.overrides));
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    const fs::path tmp = dir / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << text;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename failed: " + target.string());
}

// Run manifest: config + input hashes for provenance, metrics for the
// machine-readable result summary.
void write_manifest(const std::string& command, const CommonArgs& args,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs, const json& metrics,
                    const std::string& manifest_path) {
    json m;
    m["command"] = command;
    m["tool_version"] = kToolVersion;
    m["timestamp"] = utc_timestamp();
    if (!args.config_path.empty()) {
        m["config_path"] = args.config_path;
        m["config_hash"] = hash_file(args.config_path);
    }
    m["config_overrides"] = args.overrides;
    json in = json::object();
    for (const auto& [path, hash] : inputs) in[path] = hash;
    m["inputs"] = in;
    json out = json::object();
    for (const std::string& path : outputs) out[path] = hash_file(path);
    m["outputs"] = out;
    m["metrics"] = metrics;
    write_text_atomic(manifest_path, m.dump(2) + "\n");
}

void write_default_manifest(const std::string& command, const CommonArgs& args,
                            const std::map<std::string, std::string>& inputs,
                            const json& metrics) {
    write_manifest(command, args, inputs, {args.output}, metrics,
                   args.output + ".manifest.json");
}

// --- subcommand bodies -----------------------------------------------------

int cmd_phantom(const CommonArgs& args) {
    const RunConfig cfg = load_run_config(args);
    if (!cfg.phantom) throw ConfigError("cmd phantom requires a [phantom] section");
    const Volume3D vol = build_phantom(*cfg.phantom, cfg.require_grid());
    write_volume(args.output, vol);
    json metrics;
    metrics["voxel_count"] = vol.grid.voxel_count();
    metrics["kind"] = to_string(vol.kind);
    write_default_manifest("phantom", args, {}, metrics);
    return kOk;
}

std::vector<RytovField> add_field_noise(std::vector<RytovField> fields,
                                        const NoiseConfig& noise) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (RytovField& f : fields) {
        double rms = 0;
        for (const cplx& v : f.values) rms += std::norm(v);
        rms = std::sqrt(rms / static_cast<double>(f.values.size()));
        const double s = noise.sigma * rms / std::sqrt(2.0);
        for (cplx& v : f.values) v += cplx(s * gauss(rng), s * gauss(rng));
    }
    return fields;
}

int cmd_simulate(const CommonArgs& args, const std::string& input,
                 const std::string& holograms_out) {
    const RunConfig cfg = load_run_config(args);
    std::map<std::string, std::string> inputs;

    Volume3D phantom;
    if (!input.empty()) {
        phantom = read_volume(input);
        inputs[input] = hash_file(input);
    } else if (cfg.phantom) {
        phantom = build_phantom(*cfg.phantom, cfg.require_grid());
    } else {
        throw ConfigError("cmd simulate needs --input or a [phantom] section");
    }
    if (phantom.kind != VolumeKind::RefractiveIndex)
        throw ConfigError("cmd simulate expects a refractive_index volume");

    const IlluminationSet illums = generate_illuminations(
        cfg.optical, cfg.illumination.pattern, cfg.illumination.count,
        cfg.illumination.na_fraction);

    std::vector<RytovField> fields;
    fields.reserve(illums.k_illums.size());
    for (const Vec3& k : illums.k_illums)
        fields.push_back(simulate_rytov_field(phantom, cfg.optical, k, phantom.grid));

    if (cfg.noise) fields = add_field_noise(std::move(fields), *cfg.noise);

    write_field_stack(args.output, fields);
    std::vector<std::string> outputs{args.output};

    if (!holograms_out.empty()) {
        if (!cfg.holography)
            throw ConfigError("--holograms requires a [holography] section");
        std::vector<Interferogram> stack;
        stack.reserve(fields.size());
        for (const RytovField& psi : fields) {
            ComplexField2D total;
            total.nx = psi.nx;
            total.ny = psi.ny;
            total.pitch = psi.pitch;
            total.k_illum = psi.k_illum;
            total.values.resize(psi.values.size());
            for (int iy = 0; iy < psi.ny; ++iy)
                for (int ix = 0; ix < psi.nx; ++ix) {
                    const double x = (ix - psi.nx / 2) * psi.pitch;
                    const double y = (iy - psi.ny / 2) * psi.pitch;
                    const cplx ui = std::exp(
                        cplx(0.0, psi.k_illum[0] * x + psi.k_illum[1] * y));
                    total.values[total.index(ix, iy)] =
                        ui * std::exp(psi.values[psi.index(ix, iy)]);
                }
            stack.push_back(synthesize_interferogram(total, cfg.optical,
                                                     cfg.holography->tilt,
                                                     cfg.holography->ref_amplitude));
        }
        write_interferogram_stack(holograms_out, stack);
        outputs.push_back(holograms_out);
    }

    json metrics;
    metrics["frames"] = fields.size();
    metrics["max_relative_contrast"] = max_relative_contrast(phantom, cfg.optical);
    metrics["noise_applied"] = cfg.noise.has_value();
    write_manifest("simulate", args, inputs, outputs, metrics,
                   args.output + ".manifest.json");
    return kOk;
}

int cmd_retrieve(const CommonArgs& args, const std::string& input) {
    const RunConfig cfg = load_run_config(args);
    const std::vector<Interferogram> stack = read_interferogram_stack(input);
    std::vector<RytovField> fields;
    fields.reserve(stack.size());
    // Retrieval recovers ref_amplitude * U up to a global phase; divide out
    // the known reference amplitude before the logarithmic transform.
    const double ref_amp = cfg.holography ? cfg.holography->ref_amplitude : 1.0;
    for (const Interferogram& holo : stack) {
        ComplexField2D total = retrieve_field(holo, cfg.optical);
        for (cplx& v : total.values) v /= ref_amp;
        fields.push_back(rytov_transform(total, holo.k_illum));
    }
    write_field_stack(args.output, fields);
    json metrics;
    metrics["frames"] = fields.size();
    write_default_manifest("retrieve", args, {{input, hash_file(input)}}, metrics);
    return kOk;
}

int cmd_reconstruct(const CommonArgs& args, const std::string& input) {
    const RunConfig cfg = load_run_config(args);
    const std::vector<RytovField> fields = read_field_stack(input);
    auto [spectrum, report] =
        map_ewald(fields, cfg.optical, cfg.require_grid(), cfg.parallelism);

    GpReport gp_report;
    const Volume3D vol =
        gerchberg_papoulis(spectrum, cfg.optical, cfg.gp, &gp_report, nullptr);
    write_volume(args.output, vol);

    json metrics;
    metrics["frames_mapped"] = report.frames_mapped;
    metrics["voxels_touched"] = report.voxels_touched;
    metrics["collisions_averaged"] = report.collisions_averaged;
    metrics["evanescent_discarded"] = report.evanescent_discarded;
    metrics["gp_iterations"] = cfg.gp.iterations;
    metrics["ri_clamped_voxels"] = gp_report.ri_clamped_voxels;
    json iters = json::array();
    for (const GpIterationStats& s : gp_report.iterations) {
        json it;
        it["iteration"] = s.iteration;
        it["violation_energy"] = s.violation_energy;
        it["clamped_voxels"] = s.clamped_voxels;
        it["data_residual_max"] = s.data_residual_max;
        iters.push_back(it);
    }
    metrics["gp_diagnostics"] = iters;
    write_default_manifest("reconstruct", args, {{input, hash_file(input)}}, metrics);
    return kOk;
}

int cmd_darkfield(const CommonArgs& args, const std::string& input) {
    const RunConfig cfg = load_run_config(args);
    if (!cfg.filter) throw ConfigError("cmd darkfield requires a [filter] section");
    const Volume3D vol = read_volume(input);
    const Filter3D filter = make_filter(*cfg.filter, vol.grid);
    const Volume3D out = apply_darkfield(vol, filter);
    write_volume(args.output, out);
    json metrics;
    metrics["shape"] = cfg.filter->shape == FilterShape::Step ? "step" : "gaussian";
    metrics["cutoff_cycles_per_um"] = cfg.filter->cutoff_cycles(vol.grid);
    write_default_manifest("darkfield", args, {{input, hash_file(input)}}, metrics);
    return kOk;
}

int cmd_ctf(const CommonArgs& args) {
    const RunConfig cfg = load_run_config(args);
    if (!cfg.ctf) throw ConfigError("cmd ctf requires a [ctf] section");
    const SupportMask3D mask = make_ctf_support(cfg.optical, cfg.require_grid(),
                                                cfg.ctf->modality, cfg.ctf->epsilon,
                                                cfg.ctf->cutoff);
    write_volume(args.output, support_to_volume(mask));
    std::size_t set = 0;
    for (std::uint8_t v : mask.mask) set += v;
    json metrics;
    metrics["voxels_in_support"] = set;
    metrics["epsilon_cycles_per_um"] = mask.epsilon;
    write_default_manifest("ctf", args, {}, metrics);
    return kOk;
}

int cmd_compare(const CommonArgs& args, const std::string& input_a,
                const std::string& input_b) {
    const Volume3D a = read_volume(input_a);
    const Volume3D b = read_volume(input_b);
    const double correlation = ncc(a, b);
    json metrics;
    metrics["ncc"] = correlation;
    write_manifest("compare", args,
                   {{input_a, hash_file(input_a)}, {input_b, hash_file(input_b)}}, {},
                   metrics, args.output);
    std::cout << "ncc " << std::setprecision(17) << correlation << "\n";
    return kOk;
}

int cmd_slice(const CommonArgs& args, const std::string& input, std::string plane,
              int index) {
    if (!args.config_path.empty()) {
        const RunConfig cfg = load_run_config(args);
        if (cfg.slice) {
            if (plane.empty()) plane = cfg.slice->plane;
            if (index < 0) index = cfg.slice->index;
        }
    }
    if (plane.empty()) plane = "XY";
    if (index < 0) throw ConfigError("slice index is required (config or --index)");
    SlicePlane p;
    if (plane == "XY")
        p = SlicePlane::XY;
    else if (plane == "XZ")
        p = SlicePlane::XZ;
    else if (plane == "YZ")
        p = SlicePlane::YZ;
    else
        throw ConfigError("slice plane must be XY, XZ, or YZ");
    const Volume3D vol = read_volume(input);
    export_slice(vol, p, index, args.output);
    json metrics;
    metrics["plane"] = plane;
    metrics["index"] = index;
    write_default_manifest("slice", args, {{input, hash_file(input)}}, metrics);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dark-field optical diffraction tomography pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonArgs phantom_args;
    auto* phantom_cmd = app.add_subcommand("phantom", "voxelize a phantom volume");
    add_common(phantom_cmd, phantom_args, true);

    CommonArgs sim_args;
    std::string sim_input, sim_holograms;
    auto* sim_cmd = app.add_subcommand("simulate", "simulate complex fields per angle");
    add_common(sim_cmd, sim_args, true);
    sim_cmd->add_option("-i,--input", sim_input, "phantom volume (else built from config)");
    sim_cmd->add_option("--holograms", sim_holograms,
                        "also synthesize off-axis interferograms to this path");

    CommonArgs ret_args;
    std::string ret_input;
    auto* ret_cmd = app.add_subcommand("retrieve", "demodulate interferograms to fields");
    add_common(ret_cmd, ret_args, true);
    ret_cmd->add_option("-i,--input", ret_input, "interferogram stack")->required();

    CommonArgs rec_args;
    std::string rec_input;
    auto* rec_cmd = app.add_subcommand("reconstruct", "tomographic RI reconstruction");
    add_common(rec_cmd, rec_args, true);
    rec_cmd->add_option("-i,--input", rec_input, "field stack")->required();

    CommonArgs df_args;
    std::string df_input;
    auto* df_cmd = app.add_subcommand("darkfield", "3D high-pass filter a volume");
    add_common(df_cmd, df_args, true);
    df_cmd->add_option("-i,--input", df_input, "input volume")->required();

    CommonArgs ctf_args;
    auto* ctf_cmd = app.add_subcommand("ctf", "binary transfer-function support mask");
    add_common(ctf_cmd, ctf_args, true);

    CommonArgs cmp_args;
    std::string cmp_a, cmp_b;
    auto* cmp_cmd = app.add_subcommand("compare", "normalized cross-correlation");
    cmp_cmd->add_option("inputs", cmp_a, "first volume")->required();
    cmp_cmd->add_option("reference", cmp_b, "second volume")->required();
    cmp_cmd->add_option("-o,--output", cmp_args.output, "manifest path")->required();

    CommonArgs slice_args;
    std::string slice_input, slice_plane;
    int slice_index = -1;
    auto* slice_cmd = app.add_subcommand("slice", "export a PGM slice");
    slice_cmd->add_option("-c,--config", slice_args.config_path, "optional run config");
    slice_cmd->add_option("--set", slice_args.overrides, "config override (repeatable)");
    slice_cmd->add_option("-o,--output", slice_args.output, "PGM output path")->required();
    slice_cmd->add_option("-i,--input", slice_input, "input volume")->required();
    slice_cmd->add_option("--plane", slice_plane, "XY, XZ, or YZ");
    slice_cmd->add_option("--index", slice_index, "slice index along the fixed axis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (phantom_cmd->parsed()) return cmd_phantom(phantom_args);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args, sim_input, sim_holograms);
        if (ret_cmd->parsed()) return cmd_retrieve(ret_args, ret_input);
        if (rec_cmd->parsed()) return cmd_reconstruct(rec_args, rec_input);
        if (df_cmd->parsed()) return cmd_darkfield(df_args, df_input);
        if (ctf_cmd->parsed()) return cmd_ctf(ctf_args);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_args, cmp_a, cmp_b);
        if (slice_cmd->parsed())
            return cmd_slice(slice_args, slice_input, slice_plane, slice_index);
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << json{{"error", "io"}, {"message", e.what()}}.dump() << "\n";
        return kIo;
    } catch (const FormatError& e) {
        std::cerr << json{{"error", "format"}, {"message", e.what()}}.dump() << "\n";
        return kIo;
    } catch (const NumericError& e) {
        std::cerr << json{{"error", "numeric"}, {"message", e.what()}}.dump() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return kOther;
    }
    return kOther;
}

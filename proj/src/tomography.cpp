#include "odt/tomography.hpp"

#include <json.hpp>

#include <cmath>
#include <future>
#include <numbers>

#include "odt/fft.hpp"
#include "odt/forward.hpp"
#include "odt/phantom.hpp"

namespace odt {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Accumulator {
    std::vector<cplx> sums;
    std::vector<double> counts;
    MappingReport report;

    explicit Accumulator(std::size_t n) : sums(n, cplx(0, 0)), counts(n, 0.0) {}

    void merge(const Accumulator& other) {
        for (std::size_t i = 0; i < sums.size(); ++i) {
            sums[i] += other.sums[i];
            counts[i] += other.counts[i];
        }
        report.frames_mapped += other.report.frames_mapped;
        report.evanescent_discarded += other.report.evanescent_discarded;
    }
};

void map_one_frame(const RytovField& field, const OpticalConfig& cfg, const GridSpec& grid,
                   Accumulator& acc) {
    if (field.nx != grid.nx || field.ny != grid.ny)
        throw ConfigError("field dims do not match reconstruction grid");
    if (field.pitch != grid.pitch)
        throw ConfigError("field pitch does not match reconstruction grid");
    field.validate(cfg);

    const double k0 = cfg.k0();
    const double k_na = cfg.k_na_r_objective();
    const double scale = ewald_spectrum_scale(grid);
    const std::vector<cplx> psi_hat = fft2_centered(field.nx, field.ny, field.values);

    for (int iy = 0; iy < field.ny; ++iy) {
        const double ky = kTwoPi * (iy - field.ny / 2) * grid.freq_step_y();
        for (int ix = 0; ix < field.nx; ++ix) {
            const double kx = kTwoPi * (ix - field.nx / 2) * grid.freq_step_x();
            const double kr2 = kx * kx + ky * ky;
            if (kr2 > k_na * k_na) continue;
            if (kr2 >= k0 * k0) {
                ++acc.report.evanescent_discarded;
                continue;
            }
            const double kz = std::sqrt(k0 * k0 - kr2);
            const int vx = static_cast<int>(std::lround(
                               (kx - field.k_illum[0]) / (kTwoPi * grid.freq_step_x()))) +
                           grid.nx / 2;
            const int vy = static_cast<int>(std::lround(
                               (ky - field.k_illum[1]) / (kTwoPi * grid.freq_step_y()))) +
                           grid.ny / 2;
            const int vz = static_cast<int>(std::lround(
                               (kz - field.k_illum[2]) / (kTwoPi * grid.freq_step_z()))) +
                           grid.nz / 2;
            if (vx < 0 || vx >= grid.nx || vy < 0 || vy >= grid.ny || vz < 0 ||
                vz >= grid.nz)
                continue;
            const std::size_t v = grid.index(vx, vy, vz);
            acc.sums[v] += cplx(0.0, -kz / kTwoPi) / scale *
                           psi_hat[static_cast<std::size_t>(iy) * field.nx + ix];
            acc.counts[v] += 1.0;
        }
    }
    ++acc.report.frames_mapped;
}

}  // namespace

std::pair<Spectrum3D, MappingReport> map_ewald(const std::vector<RytovField>& fields,
                                               const OpticalConfig& cfg,
                                               const GridSpec& grid, int parallelism) {
    cfg.validate();
    grid.validate();
    if (fields.empty()) throw ConfigError("map_ewald: empty field list");
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");

    const std::size_t n = grid.voxel_count();
    Accumulator total(n);
    if (parallelism == 1 || fields.size() == 1) {
        for (const auto& f : fields) map_one_frame(f, cfg, grid, total);
    } else {
        const int workers = std::min<int>(parallelism, static_cast<int>(fields.size()));
        std::vector<std::future<Accumulator>> futures;
        for (int w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&, w] {
                Accumulator part(n);
                for (std::size_t i = w; i < fields.size(); i += workers)
                    map_one_frame(fields[i], cfg, grid, part);
                return part;
            }));
        }
        for (auto& f : futures) total.merge(f.get());
    }

    Spectrum3D spec = Spectrum3D::zeros(grid);
    MappingReport report = total.report;
    for (std::size_t i = 0; i < n; ++i) {
        if (total.counts[i] > 0) {
            spec.values[i] = total.sums[i] / total.counts[i];
            spec.weights[i] = total.counts[i];
            ++report.voxels_touched;
            report.collisions_averaged += static_cast<std::size_t>(total.counts[i]) - 1;
        }
    }
    return {std::move(spec), report};
}

Spectrum3D hermitian_complete(const Spectrum3D& spec) {
    const GridSpec& g = spec.grid;
    Spectrum3D out = spec;
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const std::size_t v = g.index(ix, iy, iz);
                // Bin i pairs with (n - i) mod n; the index-0 planes mirror
                // onto themselves.
                const std::size_t m = g.index((g.nx - ix) % g.nx, (g.ny - iy) % g.ny,
                                              (g.nz - iz) % g.nz);
                if (spec.weights[v] > 0 && spec.weights[m] == 0) {
                    out.values[m] = std::conj(spec.values[v]);
                    out.weights[m] = spec.weights[v];
                }
            }
    return out;
}

namespace {

// Measured mirror pairs are conjugate only up to the precision of the
// measurement (e.g. float32 storage); averaging each pair makes the
// spectrum exactly Hermitian so the inverse transform is real.
void symmetrize(Spectrum3D& spec) {
    const GridSpec& g = spec.grid;
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const std::size_t v = g.index(ix, iy, iz);
                const std::size_t m = g.index((g.nx - ix) % g.nx, (g.ny - iy) % g.ny,
                                              (g.nz - iz) % g.nz);
                if (m < v) continue;
                if (spec.weights[v] == 0 || spec.weights[m] == 0) continue;
                if (v == m) {
                    spec.values[v] = cplx(spec.values[v].real(), 0.0);
                    continue;
                }
                const cplx avg = 0.5 * (spec.values[v] + std::conj(spec.values[m]));
                spec.values[v] = avg;
                spec.values[m] = std::conj(avg);
            }
}

// Inverse transform of a Hermitian-completed spectrum; asserts the
// imaginary residue is numerical noise and returns the real part.
std::vector<double> inverse_to_real(const Spectrum3D& spec) {
    const std::vector<cplx> f = ifft3_centered(spec.grid, spec.values);
    double imag2 = 0.0, total2 = 0.0;
    for (const auto& v : f) {
        imag2 += v.imag() * v.imag();
        total2 += std::norm(v);
    }
    if (total2 > 0 && std::sqrt(imag2 / total2) > 1e-9)
        throw NumericError("inverse transform of completed spectrum is not real");
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
    return out;
}

Volume3D potential_to_volume(const GridSpec& grid, std::vector<double> values) {
    Volume3D pot;
    pot.grid = grid;
    pot.kind = VolumeKind::ScatteringPotential;
    pot.values = std::move(values);
    return pot;
}

}  // namespace

Volume3D reconstruct(const Spectrum3D& spectrum, const OpticalConfig& cfg,
                     std::size_t* clamped_voxels) {
    cfg.validate();
    spectrum.validate();
    Spectrum3D completed = hermitian_complete(spectrum);
    symmetrize(completed);
    Volume3D pot = potential_to_volume(spectrum.grid, inverse_to_real(completed));
    return scattering_potential_to_ri(pot, cfg, clamped_voxels);
}

Volume3D gerchberg_papoulis(const Spectrum3D& spectrum, const OpticalConfig& cfg,
                            const GpConfig& gp, GpReport* report, std::ostream* diag) {
    cfg.validate();
    spectrum.validate();
    gp.validate(spectrum.grid);
    const GridSpec& grid = spectrum.grid;
    Spectrum3D measured = hermitian_complete(spectrum);
    symmetrize(measured);

    GpReport local;
    GpReport& rep = report ? *report : local;
    rep = GpReport{};

    auto project = [&](std::vector<double>& f, GpIterationStats& stats) {
        stats.violation_energy = 0.0;
        stats.clamped_voxels = 0;
        for (auto& v : f) {
            if (v < 0) {
                stats.violation_energy += v * v;
                if (gp.enforce_nonnegativity) {
                    v = 0.0;
                    ++stats.clamped_voxels;
                }
            }
        }
        if (gp.support_mask) {
            const auto& mask = *gp.support_mask;
            for (std::size_t i = 0; i < f.size(); ++i)
                if (!mask[i]) f[i] = 0.0;
        }
    };

    Spectrum3D est = measured;
    for (int it = 1; it <= gp.iterations; ++it) {
        std::vector<double> f = inverse_to_real(est);
        GpIterationStats stats;
        stats.iteration = it;
        project(f, stats);
        est.values = fft3_centered_real(grid, f);
        // Data step: re-impose every measured sample exactly.
        for (std::size_t i = 0; i < est.values.size(); ++i)
            if (measured.weights[i] > 0) est.values[i] = measured.values[i];
        stats.data_residual_max = 0.0;
        for (std::size_t i = 0; i < est.values.size(); ++i)
            if (measured.weights[i] > 0)
                stats.data_residual_max = std::max(
                    stats.data_residual_max, std::abs(est.values[i] - measured.values[i]));
        rep.iterations.push_back(stats);
        if (diag) {
            nlohmann::json line{{"iteration", stats.iteration},
                                {"violation_energy", stats.violation_energy},
                                {"clamped_voxels", stats.clamped_voxels},
                                {"data_residual_max", stats.data_residual_max}};
            *diag << line.dump() << "\n";
        }
    }

    // Final pass: one more inverse transform and projection, so the output
    // honors the non-negativity postcondition.
    std::vector<double> f = inverse_to_real(est);
    GpIterationStats final_stats;
    final_stats.iteration = gp.iterations + 1;
    project(f, final_stats);
    Volume3D pot = potential_to_volume(grid, std::move(f));
    return scattering_potential_to_ri(pot, cfg, &rep.ri_clamped_voxels);
}

}  // namespace odt

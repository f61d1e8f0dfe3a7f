#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "odt/holography.hpp"
#include "odt/types.hpp"

namespace odt {

struct MappingReport {
    std::size_t frames_mapped = 0;
    std::size_t voxels_touched = 0;
    std::size_t collisions_averaged = 0;  // contributions beyond the first per voxel
    std::size_t evanescent_discarded = 0;
};

// Maps each Rytov field onto its Ewald cap: every non-evanescent lateral
// frequency within the objective NA contributes (k_z / 2*pi*i) * psi_hat to
// the voxel nearest K = k - k_illum. Collisions are averaged through the
// weights array. parallelism > 1 processes frames concurrently with an
// ordered reduction, so results match the sequential path.
std::pair<Spectrum3D, MappingReport> map_ewald(const std::vector<RytovField>& fields,
                                               const OpticalConfig& cfg,
                                               const GridSpec& grid, int parallelism = 1);

// Fills each unmeasured mirror voxel with the conjugate of its measured
// partner (real scattering potentials are Hermitian in Fourier space).
Spectrum3D hermitian_complete(const Spectrum3D& spec);

// Inverse transform of the Hermitian-completed spectrum, converted to RI.
// Negative radicands are clamped; more than 10% clamped voxels throws.
Volume3D reconstruct(const Spectrum3D& spectrum, const OpticalConfig& cfg,
                     std::size_t* clamped_voxels = nullptr);

struct GpConfig {
    int iterations = 8;
    bool enforce_nonnegativity = true;
    // Optional real-space object support (1 = inside), grid-sized.
    std::optional<std::vector<std::uint8_t>> support_mask;

    void validate(const GridSpec& grid) const {
        if (iterations < 0) throw ConfigError("GP iterations must be >= 0");
        if (support_mask && support_mask->size() != grid.voxel_count())
            throw ConfigError("GP support mask size does not match grid");
    }
};

struct GpIterationStats {
    int iteration = 0;
    double violation_energy = 0;    // sum over min(F, 0)^2 before projection
    std::size_t clamped_voxels = 0;
    double data_residual_max = 0;   // after re-imposing measured samples
};

struct GpReport {
    std::vector<GpIterationStats> iterations;
    std::size_t ri_clamped_voxels = 0;
};

// Gerchberg-Papoulis missing-cone iteration with a non-negative scattering
// potential constraint; a final projection follows the last data step.
// diag, when set, receives one JSON object per iteration (one per line).
Volume3D gerchberg_papoulis(const Spectrum3D& spectrum, const OpticalConfig& cfg,
                            const GpConfig& gp, GpReport* report = nullptr,
                            std::ostream* diag = nullptr);

}  // namespace odt

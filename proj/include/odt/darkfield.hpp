#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "odt/types.hpp"

namespace odt {

enum class FilterShape { Step, Gaussian };

struct FilterSpec {
    FilterShape shape = FilterShape::Gaussian;
    double cutoff = 0;  // interpreted per `unit`
    enum class Unit { CyclesPerUm, InverseFov } unit = Unit::CyclesPerUm;

    // Cutoff in cycles/um; FOV^-1 multiples convert via the smallest FOV axis.
    double cutoff_cycles(const GridSpec& grid) const {
        if (!(cutoff > 0)) throw ConfigError("filter cutoff must be positive");
        return unit == Unit::CyclesPerUm ? cutoff : cutoff / grid.fov_min();
    }

    // Scalar frequency response at |xi| (cycles/um). Step rises exactly at
    // the cutoff; the Gaussian half response sits exactly at the cutoff.
    double response(double xi_abs, double cutoff_cycles) const {
        const double q = (xi_abs * xi_abs) / (cutoff_cycles * cutoff_cycles);
        if (shape == FilterShape::Step) return q >= 1.0 ? 1.0 : 0.0;
        return 1.0 - std::exp2(-q);
    }
};

struct Filter3D {
    GridSpec grid;
    std::vector<double> response;  // in [0, 1], radially isotropic
};

Filter3D make_filter(const FilterSpec& spec, const GridSpec& grid);

// High-pass the volume in 3D frequency space. Output kind is Filtered:
// values are contrast-enhanced but no longer physical RI.
Volume3D apply_darkfield(const Volume3D& vol, const Filter3D& filter);

enum class Modality { BrightField, DarkField, QPI, ODT, DarkFieldODT };

struct SupportMask3D {
    GridSpec grid;
    std::vector<std::uint8_t> mask;
    Modality modality = Modality::ODT;
    double epsilon = 0;  // dark-field annulus margin, cycles/um
};

// Binary Fourier-domain support of a modality's transfer function.
// Voxelized Ewald caps of one-voxel thickness closed by a one-voxel
// dilation bounded by the analytic lateral extent.
//  - QPI: single normal-incidence cap.
//  - ODT / BrightField: union of caps over all illuminations within the
//    condenser NA (difference set of the detection and illumination caps).
//  - DarkField: union over annulus illuminations at k_NAr(cond) + epsilon,
//    Hermitian-completed. epsilon defaults to one frequency bin when <= 0.
//  - DarkFieldODT: ODT minus the centered ball of radius `cutoff`
//    (cycles/um, required).
SupportMask3D make_ctf_support(const OpticalConfig& cfg, const GridSpec& grid,
                               Modality modality, double epsilon = 0,
                               std::optional<double> cutoff = std::nullopt);

// Masks are stored as 0/1 volumes in the shared container format.
Volume3D support_to_volume(const SupportMask3D& mask);

}  // namespace odt

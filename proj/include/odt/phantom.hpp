#pragma once

#include <variant>
#include <vector>

#include "odt/types.hpp"

namespace odt {

struct SpherePhantom {
    Vec3 center{0, 0, 0};  // um, relative to grid center
    double radius = 0;     // um
    double n_inside = 0;
};

struct SheppLogan3D {
    double scale = 0;         // um, half-extent of the unit phantom
    double n_background = 0;  // RI assigned where the phantom value is 0
    double contrast = 0;      // delta-RI per unit phantom value
};

struct DeltaPhantom {
    std::vector<std::pair<Vec3, double>> deltas;  // (position um, delta-RI)
};

struct PhantomSpec {
    std::variant<SpherePhantom, SheppLogan3D, DeltaPhantom> variant;
    double n_medium = 1.337;
};

// Voxelizes the spec onto the grid; background voxels equal n_medium.
// Sphere boundaries use 3x3x3 subvoxel antialiasing.
Volume3D build_phantom(const PhantomSpec& spec, const GridSpec& grid);

// Converts an RI volume to the scattering potential
// F(r) = k0^2 (n^2/n_m^2 - 1) / (4 pi), and back. The inverse clamps
// negative radicands to 0 and reports how many voxels were clamped.
Volume3D ri_to_scattering_potential(const Volume3D& ri, const OpticalConfig& cfg);
Volume3D scattering_potential_to_ri(const Volume3D& pot, const OpticalConfig& cfg,
                                    std::size_t* clamped_voxels = nullptr);

enum class IlluminationPattern { Normal, CircularScan, SpiralScan };

struct IlluminationSet {
    IlluminationPattern pattern = IlluminationPattern::Normal;
    std::vector<Vec3> k_illums;  // rad/um, |k| = k0, kz > 0
};

IlluminationSet generate_illuminations(const OpticalConfig& cfg, IlluminationPattern pattern,
                                       int count = 1, double na_fraction = 1.0);

}  // namespace odt

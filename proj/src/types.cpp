#include "odt/types.hpp"

namespace odt {

Vec3 frequency_coordinate(const GridSpec& grid, int ix, int iy, int iz) {
    if (ix < 0 || ix >= grid.nx || iy < 0 || iy >= grid.ny || iz < 0 || iz >= grid.nz)
        throw ConfigError("voxel index out of range");
    return {(ix - grid.nx / 2) * grid.freq_step_x(),
            (iy - grid.ny / 2) * grid.freq_step_y(),
            (iz - grid.nz / 2) * grid.freq_step_z()};
}

std::string to_string(VolumeKind k) {
    switch (k) {
        case VolumeKind::RefractiveIndex: return "refractive_index";
        case VolumeKind::ScatteringPotential: return "scattering_potential";
        case VolumeKind::Filtered: return "filtered";
    }
    throw ConfigError("unknown volume kind");
}

VolumeKind volume_kind_from_string(const std::string& s) {
    if (s == "refractive_index") return VolumeKind::RefractiveIndex;
    if (s == "scattering_potential") return VolumeKind::ScatteringPotential;
    if (s == "filtered") return VolumeKind::Filtered;
    throw FormatError("unknown volume kind: " + s);
}

}  // namespace odt

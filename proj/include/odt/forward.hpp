#pragma once

#include "odt/types.hpp"

namespace odt {

// First-order forward model: samples the phantom's scattering-potential
// spectrum on the Ewald cap for one plane-wave illumination and returns the
// complex Rytov field psi_s(x, y) at the z=0 focal plane, band-limited to
// the objective NA. Exact inverse of the Ewald mapping on the same grid.
ComplexField2D simulate_rytov_field(const Volume3D& phantom, const OpticalConfig& cfg,
                                    const Vec3& k_illum, const GridSpec& grid);

// Total field U = U_i * exp(psi_s) at the focal plane.
ComplexField2D simulate_scattered_field(const Volume3D& phantom, const OpticalConfig& cfg,
                                        const Vec3& k_illum, const GridSpec& grid);

// Weak-scattering check; relative contrast above 5% is Rytov-questionable.
double max_relative_contrast(const Volume3D& phantom, const OpticalConfig& cfg);

// Scale tying the 2D field-spectrum bins to the 3D unitary volume spectrum:
// psi_hat(bin) = (2*pi*i / k_z) * ewald_spectrum_scale(grid) * F_hat(voxel).
double ewald_spectrum_scale(const GridSpec& grid);

}  // namespace odt

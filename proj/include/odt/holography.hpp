#pragma once

#include <string>
#include <vector>

#include "odt/types.hpp"

namespace odt {

// Off-axis interferogram. reference_tilt is the carrier frequency in
// cycles/um; it must place the sideband disc fully inside the Nyquist
// square and clear of the intensity autocorrelation baseband.
struct Interferogram {
    int nx = 0, ny = 0;
    double pitch = 0;
    std::vector<double> intensity;
    std::array<double, 2> reference_tilt{0, 0};
    Vec3 k_illum{0, 0, 0};  // carried through for downstream mapping

    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * nx + ix;
    }
};

// values = psi_s(x,y) = ln|U/U_i| + i * unwrapped(arg U - arg U_i).
using RytovField = ComplexField2D;

Interferogram synthesize_interferogram(const ComplexField2D& sample, const OpticalConfig& cfg,
                                       const std::array<double, 2>& tilt,
                                       double ref_amplitude);

// Sideband demodulation: FFT, crop the disc of radius k_NAr(objective)
// around the carrier, recentre, inverse FFT. Global phase is normalized so
// the complex mean over the lowest-10%-gradient region is real-positive.
ComplexField2D retrieve_field(const Interferogram& holo, const OpticalConfig& cfg);

struct UnwrapResult {
    std::vector<double> phase;
    int residue_count = 0;  // nonzero closed-loop sums found (warning, not fatal)
};

// 2D unwrapping by sorted-reliability path following; deterministic.
UnwrapResult unwrap_phase(int nx, int ny, const std::vector<double>& wrapped);

RytovField rytov_transform(const ComplexField2D& sample, const Vec3& k_illum);

void write_interferogram_stack(const std::string& path, const std::vector<Interferogram>& stack);
std::vector<Interferogram> read_interferogram_stack(const std::string& path);

}  // namespace odt

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "odt/errors.hpp"

namespace odt {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

// Wavelengths in micrometers, wavevectors in rad/um, spatial frequencies
// in cycles/um throughout.
struct OpticalConfig {
    double wavelength_vacuum = 0.532;  // um
    double n_medium = 1.337;
    double na_condenser = 1.2;
    double na_objective = 1.2;

    void validate() const {
        if (!(wavelength_vacuum > 0)) throw ConfigError("wavelength must be positive");
        if (!(n_medium >= 1)) throw ConfigError("medium RI must be >= 1");
        if (!(na_condenser > 0) || na_condenser > n_medium)
            throw ConfigError("condenser NA must lie in (0, n_medium]");
        if (!(na_objective > 0) || na_objective > n_medium)
            throw ConfigError("objective NA must lie in (0, n_medium]");
    }

    // k0 = 2*pi*n_m / lambda, rad/um
    double k0() const { return 2.0 * std::numbers::pi * n_medium / wavelength_vacuum; }

    // Lateral NA cutoff k_NAr = 2*pi*NA / lambda, rad/um
    double k_na_r(double na) const { return 2.0 * std::numbers::pi * na / wavelength_vacuum; }
    double k_na_r_objective() const { return k_na_r(na_objective); }
    double k_na_r_condenser() const { return k_na_r(na_condenser); }

    // Axial cutoff k_NAz = sqrt(k0^2 - k_NAr^2)
    double k_na_z(double na) const {
        const double kr = k_na_r(na);
        return std::sqrt(k0() * k0() - kr * kr);
    }
};

struct GridSpec {
    int nx = 0, ny = 0, nz = 0;
    double pitch = 0;  // um per voxel, isotropic

    void validate() const {
        for (int n : {nx, ny, nz}) {
            if (n < 8 || n % 2 != 0)
                throw ConfigError("grid counts must be even and >= 8");
        }
        if (!(pitch > 0)) throw ConfigError("pitch must be positive");
    }

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }

    double fov_x() const { return nx * pitch; }
    double fov_y() const { return ny * pitch; }
    double fov_z() const { return nz * pitch; }
    double fov_min() const { return std::min({fov_x(), fov_y(), fov_z()}); }

    // Frequency bin width per axis, cycles/um.
    double freq_step_x() const { return 1.0 / fov_x(); }
    double freq_step_y() const { return 1.0 / fov_y(); }
    double freq_step_z() const { return 1.0 / fov_z(); }

    double nyquist() const { return 1.0 / (2.0 * pitch); }

    // True when the lateral band edge 2*NA_obj/lambda is representable.
    bool alias_free(const OpticalConfig& cfg) const {
        return nyquist() > 2.0 * cfg.na_objective / cfg.wavelength_vacuum;
    }

    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(iz) * ny + iy) * nx + ix;
    }

    bool operator==(const GridSpec&) const = default;
};

// Signed frequency of a voxel under the centered-DC convention: DC sits at
// index n/2 on each axis; step = 1/FOV.
Vec3 frequency_coordinate(const GridSpec& grid, int ix, int iy, int iz);

enum class VolumeKind { RefractiveIndex, ScatteringPotential, Filtered };

std::string to_string(VolumeKind k);
VolumeKind volume_kind_from_string(const std::string& s);

struct Volume3D {
    GridSpec grid;
    VolumeKind kind = VolumeKind::RefractiveIndex;
    std::vector<double> values;

    void validate() const {
        grid.validate();
        if (values.size() != grid.voxel_count())
            throw FormatError("volume payload length does not match grid dims");
        if (kind == VolumeKind::RefractiveIndex) {
            for (double v : values)
                if (v < 1.0)
                    throw FormatError("RefractiveIndex volume contains values below 1");
        }
    }

    static Volume3D uniform(const GridSpec& g, VolumeKind kind, double value) {
        Volume3D v;
        v.grid = g;
        v.kind = kind;
        v.values.assign(g.voxel_count(), value);
        return v;
    }
};

// Complex 3D Fourier-space samples plus per-voxel contribution weights.
// weights[v] == 0 implies values[v] == 0.
struct Spectrum3D {
    GridSpec grid;
    std::vector<cplx> values;
    std::vector<double> weights;

    void validate() const {
        grid.validate();
        if (values.size() != grid.voxel_count() || weights.size() != grid.voxel_count())
            throw FormatError("spectrum payload length does not match grid dims");
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0) throw FormatError("spectrum weight is negative");
            if (weights[i] == 0 && values[i] != cplx(0.0, 0.0))
                throw FormatError("unweighted spectrum voxel has nonzero value");
        }
    }

    static Spectrum3D zeros(const GridSpec& g) {
        Spectrum3D s;
        s.grid = g;
        s.values.assign(g.voxel_count(), cplx(0.0, 0.0));
        s.weights.assign(g.voxel_count(), 0.0);
        return s;
    }
};

// A 2D complex optical field at the z=0 focal plane, tagged with the
// plane-wave illumination wavevector that produced it.
struct ComplexField2D {
    int nx = 0, ny = 0;
    double pitch = 0;  // um
    std::vector<cplx> values;
    Vec3 k_illum{0, 0, 0};  // rad/um

    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * nx + ix;
    }

    void validate(const OpticalConfig& cfg) const {
        if (nx < 8 || ny < 8 || nx % 2 || ny % 2)
            throw ConfigError("field dims must be even and >= 8");
        if (!(pitch > 0)) throw ConfigError("field pitch must be positive");
        if (values.size() != static_cast<std::size_t>(nx) * ny)
            throw FormatError("field payload length does not match dims");
        const double k0 = cfg.k0();
        if (std::abs(norm3(k_illum) - k0) > 1e-9 * k0)
            throw ConfigError("|k_illum| must equal k0");
        if (!(k_illum[2] > 0)) throw ConfigError("k_illum_z must be positive");
        const double kr = std::hypot(k_illum[0], k_illum[1]);
        if (kr > cfg.k_na_r_condenser() * (1 + 1e-9))
            throw ConfigError("illumination exceeds condenser NA");
    }
};

}  // namespace odt

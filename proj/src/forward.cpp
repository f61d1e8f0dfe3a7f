#include "odt/forward.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "odt/fft.hpp"
#include "odt/phantom.hpp"

namespace odt {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double max_relative_contrast(const Volume3D& phantom, const OpticalConfig& cfg) {
    double m = 0.0;
    for (double n : phantom.values)
        m = std::max(m, std::abs(n - cfg.n_medium) / cfg.n_medium);
    return m;
}

double ewald_spectrum_scale(const GridSpec& grid) {
    // Physical-units bridge between the continuous transforms of the
    // Fourier diffraction relation and the unitary DFTs used here:
    // F_cont = pitch^3 * sqrt(N3) * UFFT3, psi_cont = pitch^2 * sqrt(N2) * UFFT2.
    return grid.pitch * std::sqrt(static_cast<double>(grid.nz));
}

ComplexField2D simulate_rytov_field(const Volume3D& phantom, const OpticalConfig& cfg,
                                    const Vec3& k_illum, const GridSpec& grid) {
    cfg.validate();
    grid.validate();
    if (phantom.grid != grid) throw ConfigError("phantom grid does not match");
    if (!(k_illum[2] > 0)) throw ConfigError("evanescent or backward illumination");
    const double k0 = cfg.k0();
    if (std::abs(norm3(k_illum) - k0) > 1e-9 * k0)
        throw ConfigError("|k_illum| must equal k0");

    const double contrast = max_relative_contrast(phantom, cfg);
    if (contrast >= 0.05)
        std::cerr << "warning: relative RI contrast " << contrast
                  << " exceeds 0.05; Rytov linearization is questionable\n";
    if (!grid.alias_free(cfg))
        std::cerr << "warning: grid Nyquist " << grid.nyquist()
                  << " cycles/um does not cover the lateral band edge "
                  << 2.0 * cfg.na_objective / cfg.wavelength_vacuum << " cycles/um\n";

    const Volume3D pot = ri_to_scattering_potential(phantom, cfg);
    const std::vector<cplx> pot_hat = fft3_centered_real(grid, pot.values);

    const int nx = grid.nx, ny = grid.ny;
    const double k_na = cfg.k_na_r_objective();
    const double scale = ewald_spectrum_scale(grid);
    std::vector<cplx> psi_hat(static_cast<std::size_t>(nx) * ny, cplx(0.0, 0.0));
    for (int iy = 0; iy < ny; ++iy) {
        const double ky = kTwoPi * (iy - ny / 2) * grid.freq_step_y();
        for (int ix = 0; ix < nx; ++ix) {
            const double kx = kTwoPi * (ix - nx / 2) * grid.freq_step_x();
            const double kr2 = kx * kx + ky * ky;
            if (kr2 > k_na * k_na) continue;       // outside the objective pupil
            if (kr2 >= k0 * k0) continue;          // evanescent
            const double kz = std::sqrt(k0 * k0 - kr2);
            const int vx = static_cast<int>(std::lround((kx - k_illum[0]) /
                                                        (kTwoPi * grid.freq_step_x()))) +
                           grid.nx / 2;
            const int vy = static_cast<int>(std::lround((ky - k_illum[1]) /
                                                        (kTwoPi * grid.freq_step_y()))) +
                           grid.ny / 2;
            const int vz = static_cast<int>(std::lround((kz - k_illum[2]) /
                                                        (kTwoPi * grid.freq_step_z()))) +
                           grid.nz / 2;
            if (vx < 0 || vx >= grid.nx || vy < 0 || vy >= grid.ny || vz < 0 ||
                vz >= grid.nz)
                continue;
            psi_hat[static_cast<std::size_t>(iy) * nx + ix] =
                cplx(0.0, kTwoPi / kz) * scale * pot_hat[grid.index(vx, vy, vz)];
        }
    }

    ComplexField2D field;
    field.nx = nx;
    field.ny = ny;
    field.pitch = grid.pitch;
    field.k_illum = k_illum;
    field.values = ifft2_centered(nx, ny, psi_hat);
    return field;
}

ComplexField2D simulate_scattered_field(const Volume3D& phantom, const OpticalConfig& cfg,
                                        const Vec3& k_illum, const GridSpec& grid) {
    ComplexField2D field = simulate_rytov_field(phantom, cfg, k_illum, grid);
    for (int iy = 0; iy < field.ny; ++iy) {
        const double y = (iy - field.ny / 2) * field.pitch;
        for (int ix = 0; ix < field.nx; ++ix) {
            const double x = (ix - field.nx / 2) * field.pitch;
            const cplx ui = std::exp(cplx(0.0, k_illum[0] * x + k_illum[1] * y));
            auto& v = field.values[field.index(ix, iy)];
            v = ui * std::exp(v);
        }
    }
    return field;
}

}  // namespace odt

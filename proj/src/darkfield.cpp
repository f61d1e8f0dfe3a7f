#include "odt/darkfield.hpp"

#include <cmath>
#include <numbers>

#include "odt/fft.hpp"

namespace odt {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

Filter3D make_filter(const FilterSpec& spec, const GridSpec& grid) {
    grid.validate();
    const double xc = spec.cutoff_cycles(grid);
    if (xc >= grid.nyquist())
        throw ConfigError("filter cutoff is at or beyond the grid Nyquist frequency");
    Filter3D filt;
    filt.grid = grid;
    filt.response.resize(grid.voxel_count());
    for (int iz = 0; iz < grid.nz; ++iz)
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix) {
                const Vec3 xi = frequency_coordinate(grid, ix, iy, iz);
                filt.response[grid.index(ix, iy, iz)] = spec.response(norm3(xi), xc);
            }
    return filt;
}

Volume3D apply_darkfield(const Volume3D& vol, const Filter3D& filter) {
    if (vol.grid != filter.grid) throw ConfigError("volume and filter grids differ");
    if (vol.kind == VolumeKind::Filtered)
        throw ConfigError("input volume is already filtered (non-physical values)");
    std::vector<cplx> spec = fft3_centered_real(vol.grid, vol.values);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= filter.response[i];
    const std::vector<cplx> f = ifft3_centered(vol.grid, spec);
    Volume3D out;
    out.grid = vol.grid;
    out.kind = VolumeKind::Filtered;
    out.values.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = f[i].real();
    return out;
}

namespace {

struct LatticePoint {
    double kx, ky, kz;  // rad/um, on the Ewald sphere
};

// Detection (or illumination) directions sampled on the grid's lateral
// frequency lattice, limited to the given NA.
std::vector<LatticePoint> cap_lattice(const OpticalConfig& cfg, const GridSpec& grid,
                                      double na) {
    const double k0 = cfg.k0();
    const double k_na = cfg.k_na_r(na);
    std::vector<LatticePoint> pts;
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double ky = kTwoPi * (iy - grid.ny / 2) * grid.freq_step_y();
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double kx = kTwoPi * (ix - grid.nx / 2) * grid.freq_step_x();
            const double kr2 = kx * kx + ky * ky;
            if (kr2 > k_na * k_na || kr2 >= k0 * k0) continue;
            pts.push_back({kx, ky, std::sqrt(k0 * k0 - kr2)});
        }
    }
    return pts;
}

class MaskBuilder {
  public:
    MaskBuilder(const GridSpec& grid) : grid_(grid), mask_(grid.voxel_count(), 0) {}

    void mark(double kx, double ky, double kz) {
        const int vx = static_cast<int>(std::lround(kx / (kTwoPi * grid_.freq_step_x()))) +
                       grid_.nx / 2;
        const int vy = static_cast<int>(std::lround(ky / (kTwoPi * grid_.freq_step_y()))) +
                       grid_.ny / 2;
        const int vz = static_cast<int>(std::lround(kz / (kTwoPi * grid_.freq_step_z()))) +
                       grid_.nz / 2;
        if (vx < 0 || vx >= grid_.nx || vy < 0 || vy >= grid_.ny || vz < 0 || vz >= grid_.nz)
            return;
        mask_[grid_.index(vx, vy, vz)] = 1;
    }

    // Mirrors every set voxel to its Hermitian partner. The index-0 planes
    // mirror onto themselves: bin i pairs with (n - i) mod n.
    void hermitian_complete() {
        std::vector<std::uint8_t> out = mask_;
        for (int iz = 0; iz < grid_.nz; ++iz)
            for (int iy = 0; iy < grid_.ny; ++iy)
                for (int ix = 0; ix < grid_.nx; ++ix)
                    if (mask_[grid_.index(ix, iy, iz)])
                        out[grid_.index((grid_.nx - ix) % grid_.nx,
                                        (grid_.ny - iy) % grid_.ny,
                                        (grid_.nz - iz) % grid_.nz)] = 1;
        mask_ = std::move(out);
    }

    // One-voxel 26-neighborhood dilation, closing quantization gaps. The
    // lateral bound keeps the closure from growing past the analytic
    // support extent.
    void dilate(double lateral_bound_cycles) {
        std::vector<std::uint8_t> out = mask_;
        const double half_bin =
            0.5 * std::min(grid_.freq_step_x(), grid_.freq_step_y());
        for (int iz = 0; iz < grid_.nz; ++iz)
            for (int iy = 0; iy < grid_.ny; ++iy)
                for (int ix = 0; ix < grid_.nx; ++ix) {
                    if (out[grid_.index(ix, iy, iz)]) continue;
                    const Vec3 xi = frequency_coordinate(grid_, ix, iy, iz);
                    if (std::hypot(xi[0], xi[1]) > lateral_bound_cycles + half_bin)
                        continue;
                    bool neighbor = false;
                    for (int dz = -1; dz <= 1 && !neighbor; ++dz)
                        for (int dy = -1; dy <= 1 && !neighbor; ++dy)
                            for (int dx = -1; dx <= 1 && !neighbor; ++dx) {
                                if (!dx && !dy && !dz) continue;
                                const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
                                if (jx < 0 || jx >= grid_.nx || jy < 0 || jy >= grid_.ny ||
                                    jz < 0 || jz >= grid_.nz)
                                    continue;
                                neighbor = mask_[grid_.index(jx, jy, jz)];
                            }
                    if (neighbor) out[grid_.index(ix, iy, iz)] = 1;
                }
        mask_ = std::move(out);
    }

    void remove_ball(double radius_cycles) {
        for (int iz = 0; iz < grid_.nz; ++iz)
            for (int iy = 0; iy < grid_.ny; ++iy)
                for (int ix = 0; ix < grid_.nx; ++ix) {
                    const Vec3 xi = frequency_coordinate(grid_, ix, iy, iz);
                    if (norm3(xi) <= radius_cycles) mask_[grid_.index(ix, iy, iz)] = 0;
                }
    }

    std::vector<std::uint8_t> take() { return std::move(mask_); }

  private:
    GridSpec grid_;
    std::vector<std::uint8_t> mask_;
};

}  // namespace

SupportMask3D make_ctf_support(const OpticalConfig& cfg, const GridSpec& grid,
                               Modality modality, double epsilon,
                               std::optional<double> cutoff) {
    cfg.validate();
    grid.validate();
    if (modality == Modality::DarkFieldODT && !cutoff)
        throw ConfigError("DarkFieldODT support requires a cutoff");
    if (epsilon <= 0) epsilon = std::min({grid.freq_step_x(), grid.freq_step_y(),
                                          grid.freq_step_z()});

    const double k0 = cfg.k0();
    const std::vector<LatticePoint> detection = cap_lattice(cfg, grid, cfg.na_objective);
    const double lat_bound =
        (cfg.k_na_r_condenser() + cfg.k_na_r_objective()) / kTwoPi + epsilon;

    MaskBuilder builder(grid);
    switch (modality) {
        case Modality::QPI:
            for (const auto& d : detection) builder.mark(d.kx, d.ky, d.kz - k0);
            break;
        case Modality::ODT:
        case Modality::DarkFieldODT:
        case Modality::BrightField: {
            // Union of caps translated by every admissible illumination:
            // equivalently the difference set of detection and
            // illumination caps (the incoherent OTF support coincides).
            const std::vector<LatticePoint> illum =
                cap_lattice(cfg, grid, cfg.na_condenser);
            for (const auto& i : illum)
                for (const auto& d : detection)
                    builder.mark(d.kx - i.kx, d.ky - i.ky, d.kz - i.kz);
            builder.hermitian_complete();
            break;
        }
        case Modality::DarkField: {
            const double kr = cfg.k_na_r_condenser() + kTwoPi * epsilon;
            if (kr >= k0)
                throw ConfigError("dark-field annulus is evanescent for this config");
            const double kz = std::sqrt(k0 * k0 - kr * kr);
            const double bin = kTwoPi * std::min(grid.freq_step_x(), grid.freq_step_y());
            const int n_az = std::max(64, 3 * static_cast<int>(std::ceil(kTwoPi * kr / bin)));
            for (int j = 0; j < n_az; ++j) {
                const double az = kTwoPi * j / n_az;
                const double kix = kr * std::cos(az), kiy = kr * std::sin(az);
                for (const auto& d : detection)
                    builder.mark(d.kx - kix, d.ky - kiy, d.kz - kz);
            }
            builder.hermitian_complete();
            break;
        }
    }
    builder.dilate(lat_bound);
    // Edge clipping during dilation can lose the mirror of a voxel set near
    // the index-0 planes; restore exact symmetry for the Hermitian families.
    if (modality != Modality::QPI) builder.hermitian_complete();
    if (modality == Modality::DarkFieldODT) builder.remove_ball(*cutoff);

    SupportMask3D out;
    out.grid = grid;
    out.modality = modality;
    out.epsilon = epsilon;
    out.mask = builder.take();
    return out;
}

Volume3D support_to_volume(const SupportMask3D& mask) {
    Volume3D vol;
    vol.grid = mask.grid;
    vol.kind = VolumeKind::Filtered;
    vol.values.assign(mask.mask.begin(), mask.mask.end());
    return vol;
}

}  // namespace odt

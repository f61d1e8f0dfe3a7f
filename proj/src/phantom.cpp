#include "odt/phantom.hpp"

#include <cmath>
#include <numbers>

namespace odt {
namespace {

constexpr double kPi = std::numbers::pi;

struct Ellipsoid {
    double value, a, b, c, x0, y0, z0, phi_deg;
};

// Classic 3D Shepp-Logan head phantom on the unit ball.
constexpr Ellipsoid kSheppLogan[] = {
    {2.0, 0.69, 0.92, 0.81, 0.0, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.78, 0.0, -0.0184, 0.0, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.22, 0.0, 0.0, -18.0},
    {-0.2, 0.16, 0.41, 0.28, -0.22, 0.0, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.41, 0.0, 0.35, -0.15, 0.0},
    {0.1, 0.046, 0.046, 0.05, 0.0, 0.1, 0.25, 0.0},
    {0.1, 0.046, 0.046, 0.05, 0.0, -0.1, 0.25, 0.0},
    {0.1, 0.046, 0.023, 0.05, -0.08, -0.605, 0.0, 0.0},
    {0.1, 0.023, 0.023, 0.02, 0.0, -0.606, 0.0, 0.0},
    {0.1, 0.023, 0.046, 0.02, 0.06, -0.605, 0.0, 0.0},
};

double shepp_value(double x, double y, double z) {
    double v = 0.0;
    for (const auto& e : kSheppLogan) {
        const double phi = e.phi_deg * kPi / 180.0;
        const double c = std::cos(phi), s = std::sin(phi);
        const double xr = c * (x - e.x0) + s * (y - e.y0);
        const double yr = -s * (x - e.x0) + c * (y - e.y0);
        const double zr = z - e.z0;
        const double q = (xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) +
                         (zr / e.c) * (zr / e.c);
        if (q <= 1.0) v += e.value;
    }
    return v;
}

// Voxel center position relative to the grid center, um.
inline double coord(int i, int n, double pitch) { return (i - n / 2) * pitch; }

void fill_sphere(Volume3D& vol, const SpherePhantom& s, double n_medium) {
    const GridSpec& g = vol.grid;
    const double margin = 2.0 * g.pitch;
    const double half[3] = {g.fov_x() / 2, g.fov_y() / 2, g.fov_z() / 2};
    if (!(s.radius > 0)) throw ConfigError("sphere radius must be positive");
    for (int a = 0; a < 3; ++a)
        if (std::abs(s.center[a]) + s.radius > half[a] - margin)
            throw ConfigError("sphere does not fit inside the grid with a 2-voxel margin");

    const double r2 = s.radius * s.radius;
    // Fully inside/outside voxels resolved by center distance; boundary
    // shell gets 3x3x3 subvoxel averaging.
    const double shell = std::sqrt(3.0) * g.pitch / 2.0;
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const double x = coord(ix, g.nx, g.pitch) - s.center[0];
                const double y = coord(iy, g.ny, g.pitch) - s.center[1];
                const double z = coord(iz, g.nz, g.pitch) - s.center[2];
                const double d = std::sqrt(x * x + y * y + z * z);
                double frac;
                if (d <= s.radius - shell) {
                    frac = 1.0;
                } else if (d >= s.radius + shell) {
                    frac = 0.0;
                } else {
                    int inside = 0;
                    for (int sz = -1; sz <= 1; ++sz)
                        for (int sy = -1; sy <= 1; ++sy)
                            for (int sx = -1; sx <= 1; ++sx) {
                                const double xs = x + sx * g.pitch / 3.0;
                                const double ys = y + sy * g.pitch / 3.0;
                                const double zs = z + sz * g.pitch / 3.0;
                                if (xs * xs + ys * ys + zs * zs <= r2) ++inside;
                            }
                    frac = inside / 27.0;
                }
                vol.values[g.index(ix, iy, iz)] = n_medium + frac * (s.n_inside - n_medium);
            }
}

void fill_shepp(Volume3D& vol, const SheppLogan3D& s) {
    const GridSpec& g = vol.grid;
    if (!(s.scale > 0)) throw ConfigError("Shepp-Logan scale must be positive");
    const double margin = 2.0 * g.pitch;
    if (s.scale > g.fov_min() / 2 - margin)
        throw ConfigError("Shepp-Logan phantom does not fit inside the grid");
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const double x = coord(ix, g.nx, g.pitch) / s.scale;
                const double y = coord(iy, g.ny, g.pitch) / s.scale;
                const double z = coord(iz, g.nz, g.pitch) / s.scale;
                const double p = shepp_value(x, y, z);
                vol.values[g.index(ix, iy, iz)] = s.n_background + s.contrast * p;
            }
}

void fill_deltas(Volume3D& vol, const DeltaPhantom& d) {
    const GridSpec& g = vol.grid;
    for (const auto& [pos, dn] : d.deltas) {
        const int ix = static_cast<int>(std::lround(pos[0] / g.pitch)) + g.nx / 2;
        const int iy = static_cast<int>(std::lround(pos[1] / g.pitch)) + g.ny / 2;
        const int iz = static_cast<int>(std::lround(pos[2] / g.pitch)) + g.nz / 2;
        if (ix < 0 || ix >= g.nx || iy < 0 || iy >= g.ny || iz < 0 || iz >= g.nz)
            throw ConfigError("delta scatterer outside the grid");
        vol.values[g.index(ix, iy, iz)] += dn;
    }
}

}  // namespace

Volume3D build_phantom(const PhantomSpec& spec, const GridSpec& grid) {
    grid.validate();
    Volume3D vol = Volume3D::uniform(grid, VolumeKind::RefractiveIndex, spec.n_medium);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SpherePhantom>)
                fill_sphere(vol, v, spec.n_medium);
            else if constexpr (std::is_same_v<T, SheppLogan3D>)
                fill_shepp(vol, v);
            else
                fill_deltas(vol, v);
        },
        spec.variant);
    vol.validate();  // enforces n >= 1 everywhere
    return vol;
}

Volume3D ri_to_scattering_potential(const Volume3D& ri, const OpticalConfig& cfg) {
    if (ri.kind != VolumeKind::RefractiveIndex)
        throw ConfigError("scattering potential conversion requires an RI volume");
    cfg.validate();
    const double k0 = cfg.k0();
    const double nm2 = cfg.n_medium * cfg.n_medium;
    Volume3D out;
    out.grid = ri.grid;
    out.kind = VolumeKind::ScatteringPotential;
    out.values.resize(ri.values.size());
    for (std::size_t i = 0; i < ri.values.size(); ++i) {
        const double n = ri.values[i];
        out.values[i] = k0 * k0 * (n * n / nm2 - 1.0) / (4.0 * kPi);
    }
    return out;
}

Volume3D scattering_potential_to_ri(const Volume3D& pot, const OpticalConfig& cfg,
                                    std::size_t* clamped_voxels) {
    if (pot.kind != VolumeKind::ScatteringPotential)
        throw ConfigError("RI conversion requires a scattering-potential volume");
    cfg.validate();
    const double k0 = cfg.k0();
    Volume3D out;
    out.grid = pot.grid;
    out.kind = VolumeKind::RefractiveIndex;
    out.values.resize(pot.values.size());
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < pot.values.size(); ++i) {
        double radicand = 1.0 + 4.0 * kPi * pot.values[i] / (k0 * k0);
        if (radicand < 0) {
            radicand = 0;
            ++clamped;
        }
        out.values[i] = cfg.n_medium * std::sqrt(radicand);
    }
    if (clamped_voxels) *clamped_voxels = clamped;
    if (clamped > pot.values.size() / 10)
        throw NumericError("degenerate reconstruction: >10% of voxels clamped (" +
                           std::to_string(clamped) + " of " +
                           std::to_string(pot.values.size()) + ")");
    return out;
}

IlluminationSet generate_illuminations(const OpticalConfig& cfg, IlluminationPattern pattern,
                                       int count, double na_fraction) {
    cfg.validate();
    if (count < 1) throw ConfigError("illumination count must be >= 1");
    if (!(na_fraction > 0) || na_fraction > 1.0)
        throw ConfigError("na_fraction must lie in (0, 1]");
    const double k0 = cfg.k0();
    const double kr_max = cfg.k_na_r_condenser();
    IlluminationSet set;
    set.pattern = pattern;
    switch (pattern) {
        case IlluminationPattern::Normal:
            set.k_illums.push_back({0.0, 0.0, k0});
            break;
        case IlluminationPattern::CircularScan: {
            const double kr = na_fraction * kr_max;
            const double kz = std::sqrt(k0 * k0 - kr * kr);
            for (int j = 0; j < count; ++j) {
                const double az = 2.0 * kPi * j / count;
                set.k_illums.push_back({kr * std::cos(az), kr * std::sin(az), kz});
            }
            break;
        }
        case IlluminationPattern::SpiralScan: {
            // Golden-angle spiral out to na_fraction of the condenser NA.
            const double golden = kPi * (3.0 - std::sqrt(5.0));
            for (int j = 0; j < count; ++j) {
                const double kr =
                    na_fraction * kr_max * std::sqrt((j + 1.0) / count);
                const double az = j * golden;
                const double kz = std::sqrt(k0 * k0 - kr * kr);
                set.k_illums.push_back({kr * std::cos(az), kr * std::sin(az), kz});
            }
            break;
        }
    }
    return set;
}

}  // namespace odt

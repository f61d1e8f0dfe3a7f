#include "odt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace odt {

namespace {

// Compensated (Kahan) accumulator: summing ~2M near-identical terms in
// plain doubles loses enough precision to break affine invariance at the
// 1e-12 level on large volumes.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

double ncc(const Volume3D& a, const Volume3D& b) {
    if (a.grid != b.grid) throw ConfigError("ncc: volume grids differ");
    const std::size_t n = a.values.size();
    KahanSum sum_a, sum_b;
    for (std::size_t i = 0; i < n; ++i) {
        sum_a.add(a.values[i]);
        sum_b.add(b.values[i]);
    }
    const double mean_a = sum_a.sum / static_cast<double>(n);
    const double mean_b = sum_b.sum / static_cast<double>(n);
    KahanSum cov_s, var_a_s, var_b_s;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.values[i] - mean_a;
        const double db = b.values[i] - mean_b;
        cov_s.add(da * db);
        var_a_s.add(da * da);
        var_b_s.add(db * db);
    }
    const double cov = cov_s.sum, var_a = var_a_s.sum, var_b = var_b_s.sum;
    if (var_a == 0 || var_b == 0)
        throw NumericError("ncc is undefined for a constant volume");
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double ringing_energy(const Volume3D& vol, const std::vector<std::uint8_t>& object_mask,
                      int guard_voxels) {
    const GridSpec& g = vol.grid;
    if (object_mask.size() != g.voxel_count())
        throw ConfigError("ringing_energy: mask size does not match grid");
    if (guard_voxels < 1) throw ConfigError("ringing_energy: guard must be >= 1");

    std::vector<std::uint8_t> dilated = object_mask;
    for (int step = 0; step < guard_voxels; ++step) {
        std::vector<std::uint8_t> next = dilated;
        for (int iz = 0; iz < g.nz; ++iz)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix) {
                    if (next[g.index(ix, iy, iz)]) continue;
                    for (int dz = -1; dz <= 1; ++dz)
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
                                if (jx < 0 || jx >= g.nx || jy < 0 || jy >= g.ny ||
                                    jz < 0 || jz >= g.nz)
                                    continue;
                                if (dilated[g.index(jx, jy, jz)]) {
                                    next[g.index(ix, iy, iz)] = 1;
                                    goto next_voxel;
                                }
                            }
                next_voxel:;
                }
        dilated = std::move(next);
    }

    double sum = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < dilated.size(); ++i)
        if (!dilated[i]) {
            sum += vol.values[i] * vol.values[i];
            ++count;
        }
    if (count == 0) throw ConfigError("ringing_energy: exterior shell is empty");
    return sum / static_cast<double>(count);
}

void export_slice(const Volume3D& vol, SlicePlane plane, int index, const std::string& path,
                  std::optional<std::pair<double, double>> value_range) {
    const GridSpec& g = vol.grid;
    int w = 0, h = 0;
    switch (plane) {
        case SlicePlane::XY:
            if (index < 0 || index >= g.nz) throw ConfigError("slice index out of range");
            w = g.nx;
            h = g.ny;
            break;
        case SlicePlane::XZ:
            if (index < 0 || index >= g.ny) throw ConfigError("slice index out of range");
            w = g.nx;
            h = g.nz;
            break;
        case SlicePlane::YZ:
            if (index < 0 || index >= g.nx) throw ConfigError("slice index out of range");
            w = g.ny;
            h = g.nz;
            break;
    }
    auto sample = [&](int u, int v) {
        switch (plane) {
            case SlicePlane::XY: return vol.values[g.index(u, v, index)];
            case SlicePlane::XZ: return vol.values[g.index(u, index, v)];
            default: return vol.values[g.index(index, u, v)];
        }
    };

    double lo, hi;
    if (value_range) {
        lo = value_range->first;
        hi = value_range->second;
    } else {
        lo = hi = sample(0, 0);
        for (int v = 0; v < h; ++v)
            for (int u = 0; u < w; ++u) {
                lo = std::min(lo, sample(u, v));
                hi = std::max(hi, sample(u, v));
            }
    }

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) {
            int gray;
            if (hi == lo) {
                gray = 128;
            } else {
                gray = static_cast<int>(
                    std::lround((sample(u, v) - lo) / (hi - lo) * 255.0));
                gray = std::clamp(gray, 0, 255);
            }
            pixels[static_cast<std::size_t>(v) * w + u] = static_cast<std::uint8_t>(gray);
        }

    const std::filesystem::path target(path);
    const std::filesystem::path tmp =
        target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << "P5\n" << w << " " << h << "\n255\n";
        out.write(reinterpret_cast<const char*>(pixels.data()),
                  static_cast<std::streamsize>(pixels.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw IoError("rename failed: " + target.string());

    std::ofstream side(path + ".txt", std::ios::trunc);
    if (!side) throw IoError("cannot write sidecar: " + path + ".txt");
    const char* plane_name = plane == SlicePlane::XY ? "XY"
                             : plane == SlicePlane::XZ ? "XZ" : "YZ";
    side.precision(17);
    side << "plane " << plane_name << "\nindex " << index << "\nvalue_min " << lo
         << "\nvalue_max " << hi << "\ngray_min 0\ngray_max 255\n";
}

}  // namespace odt

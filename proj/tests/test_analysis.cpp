#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "odt/analysis.hpp"
#include "odt/phantom.hpp"

using namespace odt;
namespace fs = std::filesystem;

namespace {

Volume3D random_volume(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(1.3, 1.6);
    Volume3D v = Volume3D::uniform(g, VolumeKind::RefractiveIndex, 1.3);
    for (auto& x : v.values) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("ncc of a volume with itself is 1") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D a = random_volume(g, 1);
    CHECK(ncc(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ncc is invariant under positive affine rescaling") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D a = random_volume(g, 2);
    Volume3D b = a;
    b.kind = VolumeKind::Filtered;
    for (auto& v : b.values) v = 2.0 * v + 3.0;
    CHECK(std::abs(ncc(a, b) - 1.0) < 1e-12);
}

TEST_CASE("ncc is symmetric and permutation-invariant") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D a = random_volume(g, 3);
    const Volume3D b = random_volume(g, 4);
    CHECK(std::abs(ncc(a, b) - ncc(b, a)) < 1e-12);

    // common permutation of both volumes leaves the value unchanged
    std::vector<std::size_t> perm(g.voxel_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937(5));
    Volume3D pa = a, pb = b;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        pa.values[i] = a.values[perm[i]];
        pb.values[i] = b.values[perm[i]];
    }
    CHECK(std::abs(ncc(pa, pb) - ncc(a, b)) < 1e-12);
}

TEST_CASE("ncc rejects constant volumes and mismatched grids") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D a = random_volume(g, 6);
    const Volume3D c = Volume3D::uniform(g, VolumeKind::RefractiveIndex, 1.5);
    CHECK_THROWS_AS(ncc(a, c), NumericError);
    const Volume3D other = random_volume(GridSpec{16, 16, 32, 0.25}, 7);
    CHECK_THROWS_AS(ncc(a, other), ConfigError);
}

TEST_CASE("ringing energy of a zero volume is zero") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D zero = Volume3D::uniform(g, VolumeKind::Filtered, 0.0);
    std::vector<std::uint8_t> mask(g.voxel_count(), 0);
    mask[g.index(8, 8, 8)] = 1;
    CHECK(ringing_energy(zero, mask, 2) == 0.0);
}

TEST_CASE("ringing energy scales quadratically with exterior amplitude") {
    GridSpec g{16, 16, 16, 0.25};
    Volume3D vol = Volume3D::uniform(g, VolumeKind::Filtered, 0.0);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : vol.values) v = dist(rng);
    std::vector<std::uint8_t> mask(g.voxel_count(), 0);
    for (int iz = 6; iz < 10; ++iz)
        for (int iy = 6; iy < 10; ++iy)
            for (int ix = 6; ix < 10; ++ix) mask[g.index(ix, iy, iz)] = 1;
    const double base = ringing_energy(vol, mask, 1);
    Volume3D scaled = vol;
    for (auto& v : scaled.values) v *= 3.0;
    const double tripled = ringing_energy(scaled, mask, 1);
    CHECK(tripled == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("ringing energy rejects an empty exterior") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D vol = Volume3D::uniform(g, VolumeKind::Filtered, 0.0);
    std::vector<std::uint8_t> mask(g.voxel_count(), 1);
    CHECK_THROWS_AS(ringing_energy(vol, mask, 1), ConfigError);
    CHECK_THROWS_AS(ringing_energy(vol, std::vector<std::uint8_t>(8, 1), 1), ConfigError);
}

TEST_CASE("constant slice exports as uniform mid-gray") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D vol = Volume3D::uniform(g, VolumeKind::RefractiveIndex, 1.5);
    const fs::path p = fs::temp_directory_path() / "odt_slice_const.pgm";
    export_slice(vol, SlicePlane::XY, 8, p.string());
    std::ifstream in(p, std::ios::binary);
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    in.get();
    CHECK(magic == "P5");
    CHECK(w == 16);
    CHECK(h == 16);
    std::vector<unsigned char> pixels(256);
    in.read(reinterpret_cast<char*>(pixels.data()), 256);
    for (auto px : pixels) CHECK(static_cast<int>(px) == 128);
}

TEST_CASE("bead slice maps interior to white and exterior to black") {
    GridSpec g{32, 32, 32, 0.25};
    PhantomSpec spec;
    spec.n_medium = 1.574;
    spec.variant = SpherePhantom{{0, 0, 0}, 2.0, 1.5983};
    const Volume3D vol = build_phantom(spec, g);
    const fs::path p = fs::temp_directory_path() / "odt_slice_bead.pgm";
    export_slice(vol, SlicePlane::XY, 16, p.string(), std::pair{1.574, 1.5983});
    std::ifstream in(p, std::ios::binary);
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    in.get();
    std::vector<unsigned char> pixels(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    CHECK(static_cast<int>(pixels[16 * 32 + 16]) == 255);  // center
    CHECK(static_cast<int>(pixels[1 * 32 + 1]) == 0);      // corner

    // sidecar records the mapping
    std::ifstream side(p.string() + ".txt");
    std::string text((std::istreambuf_iterator<char>(side)), {});
    CHECK(text.find("value_min 1.574") != std::string::npos);
}

TEST_CASE("slice export round-trip reproduces the quantized bytes") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D vol = random_volume(g, 9);
    const fs::path p1 = fs::temp_directory_path() / "odt_slice_a.pgm";
    const fs::path p2 = fs::temp_directory_path() / "odt_slice_b.pgm";
    export_slice(vol, SlicePlane::XZ, 7, p1.string());
    export_slice(vol, SlicePlane::XZ, 7, p2.string());
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), {});
    std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
    CHECK(!b1.empty());
}

TEST_CASE("slice export rejects out-of-range indices") {
    GridSpec g{16, 16, 16, 0.25};
    const Volume3D vol = Volume3D::uniform(g, VolumeKind::RefractiveIndex, 1.5);
    CHECK_THROWS_AS(export_slice(vol, SlicePlane::XY, 16, "/tmp/odt_slice_oob.pgm"),
                    ConfigError);
}

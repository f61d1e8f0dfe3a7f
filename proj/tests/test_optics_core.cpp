#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "odt/fft.hpp"
#include "odt/io.hpp"
#include "odt/types.hpp"

using namespace odt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "odt_core_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Random volume whose values survive the float32 payload exactly.
Volume3D random_f32_volume(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(1.0f, 2.0f);
    Volume3D v = Volume3D::uniform(g, VolumeKind::RefractiveIndex, 1.0);
    for (auto& x : v.values) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("frequency_coordinate pins DC at the center voxel") {
    GridSpec g{64, 64, 64, 0.25};
    const Vec3 dc = frequency_coordinate(g, 32, 32, 32);
    CHECK(dc[0] == 0.0);
    CHECK(dc[1] == 0.0);
    CHECK(dc[2] == 0.0);
}

TEST_CASE("frequency_coordinate step is 1/FOV") {
    GridSpec g{64, 64, 64, 0.25};
    // 1/(64*0.25) = 0.0625 cycles/um, one bin above DC
    const Vec3 f = frequency_coordinate(g, 33, 32, 32);
    CHECK(f[0] == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(f[1] == 0.0);
    // most negative row: -nx/2 * step = -2 cycles/um
    const Vec3 neg = frequency_coordinate(g, 0, 32, 32);
    CHECK(neg[0] == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("frequency_coordinate rejects out-of-range indices") {
    GridSpec g{16, 16, 16, 0.5};
    CHECK_THROWS_AS(frequency_coordinate(g, 16, 0, 0), ConfigError);
    CHECK_THROWS_AS(frequency_coordinate(g, -1, 0, 0), ConfigError);
}

TEST_CASE("frequency_coordinate is odd-symmetric about DC") {
    GridSpec g{16, 24, 32, 0.3};
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int dx = static_cast<int>(rng() % 8) - 4;
        const int dy = static_cast<int>(rng() % 8) - 4;
        const int dz = static_cast<int>(rng() % 8) - 4;
        const Vec3 plus = frequency_coordinate(g, 8 + dx, 12 + dy, 16 + dz);
        const Vec3 minus = frequency_coordinate(g, 8 - dx, 12 - dy, 16 - dz);
        for (int a = 0; a < 3; ++a) CHECK(plus[a] == doctest::Approx(-minus[a]).epsilon(1e-15));
    }
}

TEST_CASE("NA cutoffs satisfy k_NAz^2 + k_NAr^2 = k0^2") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> wl(0.3, 1.1), nm(1.0, 1.6), frac(0.1, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        OpticalConfig cfg;
        cfg.wavelength_vacuum = wl(rng);
        cfg.n_medium = nm(rng);
        cfg.na_condenser = frac(rng) * cfg.n_medium;
        cfg.na_objective = frac(rng) * cfg.n_medium;
        cfg.validate();
        for (double na : {cfg.na_condenser, cfg.na_objective}) {
            const double kr = cfg.k_na_r(na), kz = cfg.k_na_z(na), k0 = cfg.k0();
            CHECK(std::abs(kr * kr + kz * kz - k0 * k0) <= 1e-12 * k0 * k0);
        }
    }
}

TEST_CASE("OpticalConfig invariants are enforced") {
    OpticalConfig cfg;
    cfg.n_medium = 0.9;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = OpticalConfig{};
    cfg.na_objective = cfg.n_medium + 0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("GridSpec rejects odd or tiny grids") {
    CHECK_THROWS_AS((GridSpec{7, 8, 8, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{8, 8, 9, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{8, 8, 8, 0.0}.validate()), ConfigError);
}

TEST_CASE("volume file round-trip is bit-identical") {
    GridSpec g{16, 16, 16, 0.5};
    const Volume3D v = random_f32_volume(g, 42);
    const fs::path p = temp_dir() / "vol_rt.odt";
    write_volume(p.string(), v);
    const Volume3D r = read_volume(p.string());
    CHECK(r.grid == v.grid);
    CHECK(r.kind == v.kind);
    REQUIRE(r.values.size() == v.values.size());
    for (std::size_t i = 0; i < v.values.size(); ++i) CHECK(r.values[i] == v.values[i]);

    // Second write of the read-back volume must produce identical bytes.
    const fs::path p2 = temp_dir() / "vol_rt2.odt";
    write_volume(p2.string(), r);
    std::ifstream f1(p, std::ios::binary), f2(p2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), {});
    std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
}

TEST_CASE("volume reader rejects payload shorter than the header claims") {
    GridSpec g{8, 8, 8, 0.5};
    const Volume3D v = random_f32_volume(g, 1);
    const fs::path p = temp_dir() / "vol_trunc.odt";
    write_volume(p.string(), v);
    // Truncate to a 7^3-sized payload.
    const auto full = fs::file_size(p);
    const std::size_t header = full - 512 * sizeof(float);
    fs::resize_file(p, header + 343 * sizeof(float));
    CHECK_THROWS_AS(read_volume(p.string()), FormatError);
}

TEST_CASE("volume reader enforces the RI >= 1 invariant") {
    GridSpec g{8, 8, 8, 0.5};
    Volume3D v = Volume3D::uniform(g, VolumeKind::Filtered, 0.9);
    const fs::path p = temp_dir() / "vol_badri.odt";
    write_volume(p.string(), v);  // legal as Filtered
    // Patch the header kind in place to claim RI data.
    std::ifstream in(p, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    const auto pos = bytes.find("\"filtered\"");
    REQUIRE(pos != std::string::npos);
    bytes.replace(pos, 10, "\"refractive_index\"");
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_AS(read_volume(p.string()), FormatError);
}

TEST_CASE("volume reader rejects unknown versions and malformed headers") {
    const fs::path p = temp_dir() / "vol_badver.odt";
    {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << R"({"format":"odt-volume","version":9,"endianness":"little"})" << "\n";
    }
    CHECK_THROWS_AS(read_volume(p.string()), FormatError);
    {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << "not json at all\n";
    }
    CHECK_THROWS_AS(read_volume(p.string()), FormatError);
}

TEST_CASE("spectrum file round-trip preserves values and weights") {
    GridSpec g{8, 8, 8, 0.4};
    Spectrum3D s = Spectrum3D::zeros(g);
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (std::size_t i = 0; i < s.values.size(); i += 3) {
        s.values[i] = cplx(dist(rng), dist(rng));
        s.weights[i] = 2.0;
    }
    const fs::path p = temp_dir() / "spec_rt.odt";
    write_spectrum(p.string(), s);
    const Spectrum3D r = read_spectrum(p.string());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(r.values[i] == s.values[i]);
        CHECK(r.weights[i] == s.weights[i]);
    }
}

TEST_CASE("field stack round-trip keeps per-frame illumination tags") {
    OpticalConfig cfg;
    const double k0 = cfg.k0();
    std::vector<ComplexField2D> stack;
    std::mt19937 rng(5);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (int f = 0; f < 3; ++f) {
        ComplexField2D field;
        field.nx = 8;
        field.ny = 8;
        field.pitch = 0.25;
        const double kr = 0.3 * f;
        field.k_illum = {kr, 0.0, std::sqrt(k0 * k0 - kr * kr)};
        field.values.resize(64);
        for (auto& v : field.values) v = cplx(dist(rng), dist(rng));
        stack.push_back(field);
    }
    const fs::path p = temp_dir() / "fields_rt.odt";
    write_field_stack(p.string(), stack);
    const auto r = read_field_stack(p.string());
    REQUIRE(r.size() == stack.size());
    for (std::size_t f = 0; f < stack.size(); ++f) {
        CHECK(r[f].k_illum == stack[f].k_illum);
        for (std::size_t i = 0; i < 64; ++i) CHECK(r[f].values[i] == stack[f].values[i]);
    }
}

TEST_CASE("unitary FFTs satisfy Parseval and invert exactly") {
    GridSpec g{16, 16, 16, 0.5};
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<cplx> x(g.voxel_count());
    for (auto& v : x) v = cplx(dist(rng), dist(rng));
    const auto X = fft3_centered(g, x);
    double e_time = 0, e_freq = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        e_time += std::norm(x[i]);
        e_freq += std::norm(X[i]);
    }
    CHECK(e_freq == doctest::Approx(e_time).epsilon(1e-12));
    const auto back = ifft3_centered(g, X);
    double max_err = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        max_err = std::max(max_err, std::abs(back[i] - x[i]));
    CHECK(max_err < 1e-12);
}

TEST_CASE("real input produces a Hermitian centered spectrum") {
    GridSpec g{16, 16, 16, 0.5};
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(g.voxel_count());
    for (auto& v : x) v = dist(rng);
    const auto X = fft3_centered_real(g, x);
    for (int iz = 1; iz < g.nz; ++iz)
        for (int iy = 1; iy < g.ny; ++iy)
            for (int ix = 1; ix < g.nx; ++ix) {
                const cplx a = X[g.index(ix, iy, iz)];
                const cplx b = X[g.index(g.nx - ix, g.ny - iy, g.nz - iz)];
                CHECK(std::abs(a - std::conj(b)) <= 1e-9 * (std::abs(a) + 1e-30));
            }
}

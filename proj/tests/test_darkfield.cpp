#include <doctest.h>

#include <cmath>
#include <random>

#include "odt/darkfield.hpp"
#include "odt/fft.hpp"
#include "odt/phantom.hpp"

using namespace odt;

namespace {

OpticalConfig matched_na_config() {
    OpticalConfig cfg;
    cfg.wavelength_vacuum = 0.532;
    cfg.n_medium = 1.337;
    cfg.na_condenser = 1.2;
    cfg.na_objective = 1.2;
    return cfg;
}

Filter3D all_pass(const GridSpec& g) {
    Filter3D f;
    f.grid = g;
    f.response.assign(g.voxel_count(), 1.0);
    return f;
}

}  // namespace

TEST_CASE("filter closed forms: step rise and Gaussian half response at the cutoff") {
    FilterSpec gauss{FilterShape::Gaussian, 1.0, FilterSpec::Unit::CyclesPerUm};
    CHECK(gauss.response(0.0, 1.0) == 0.0);        // DC exactly blocked
    CHECK(gauss.response(1.0, 1.0) == 0.5);        // half response exactly at cutoff
    FilterSpec step{FilterShape::Step, 1.0, FilterSpec::Unit::CyclesPerUm};
    CHECK(step.response(0.0, 1.0) == 0.0);
    CHECK(step.response(0.999, 1.0) == 0.0);
    CHECK(step.response(1.0, 1.0) == 1.0);
}

TEST_CASE("realized filters stay in [0,1], are isotropic, and Gaussian is monotone") {
    GridSpec g{32, 32, 32, 0.25};
    const Filter3D f = make_filter({FilterShape::Gaussian, 0.8, FilterSpec::Unit::CyclesPerUm}, g);
    CHECK(f.response[g.index(16, 16, 16)] == 0.0);
    double prev = -1.0;
    for (int ix = 16; ix < 32; ++ix) {
        const double r = f.response[g.index(ix, 16, 16)];
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
        CHECK(r >= prev);
        prev = r;
    }
    // isotropy: equal |xi| gives equal response along different axes
    CHECK(f.response[g.index(20, 16, 16)] == doctest::Approx(f.response[g.index(16, 20, 16)]).epsilon(1e-12));
    CHECK(f.response[g.index(16, 16, 20)] == doctest::Approx(f.response[g.index(16, 20, 16)]).epsilon(1e-12));
}

TEST_CASE("cutoff in inverse-FOV units converts via the smallest FOV axis") {
    GridSpec g{32, 32, 32, 0.25};  // FOV 8 um
    FilterSpec spec{FilterShape::Step, 10.0, FilterSpec::Unit::InverseFov};
    CHECK(spec.cutoff_cycles(g) == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("cutoff beyond Nyquist is rejected") {
    GridSpec g{32, 32, 32, 0.25};  // Nyquist 2 cycles/um
    CHECK_THROWS_AS(
        make_filter({FilterShape::Step, 2.5, FilterSpec::Unit::CyclesPerUm}, g), ConfigError);
}

TEST_CASE("all-pass filter is the identity and output is tagged Filtered") {
    GridSpec g{16, 16, 16, 0.25};
    PhantomSpec spec;
    spec.n_medium = 1.4;
    spec.variant = SpherePhantom{{0, 0, 0}, 0.8, 1.45};
    const Volume3D vol = build_phantom(spec, g);
    const Volume3D out = apply_darkfield(vol, all_pass(g));
    CHECK(out.kind == VolumeKind::Filtered);
    for (std::size_t i = 0; i < vol.values.size(); ++i)
        CHECK(out.values[i] == doctest::Approx(vol.values[i]).epsilon(1e-12));
}

TEST_CASE("a DC-blocking filter removes the volume mean") {
    GridSpec g{16, 16, 16, 0.25};
    PhantomSpec spec;
    spec.n_medium = 1.4;
    spec.variant = SpherePhantom{{0, 0, 0}, 0.8, 1.45};
    const Volume3D vol = build_phantom(spec, g);
    const Filter3D f =
        make_filter({FilterShape::Gaussian, 0.5, FilterSpec::Unit::CyclesPerUm}, g);
    const Volume3D out = apply_darkfield(vol, f);
    double mean = 0;
    for (double v : out.values) mean += v;
    mean /= static_cast<double>(out.values.size());
    CHECK(std::abs(mean) < 1e-9 * 1.45);
}

TEST_CASE("filtering is linear and Parseval-consistent") {
    GridSpec g{16, 16, 16, 0.3};
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Volume3D a = Volume3D::uniform(g, VolumeKind::ScatteringPotential, 0.0);
    Volume3D b = a;
    for (auto& v : a.values) v = dist(rng);
    for (auto& v : b.values) v = dist(rng);
    const Filter3D f =
        make_filter({FilterShape::Gaussian, 0.7, FilterSpec::Unit::CyclesPerUm}, g);

    Volume3D combo = a;
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 2.0 * a.values[i] - 3.0 * b.values[i];
    const Volume3D fa = apply_darkfield(a, f);
    const Volume3D fb = apply_darkfield(b, f);
    const Volume3D fc = apply_darkfield(combo, f);
    for (std::size_t i = 0; i < fc.values.size(); ++i)
        CHECK(std::abs(fc.values[i] - (2.0 * fa.values[i] - 3.0 * fb.values[i])) < 1e-9);

    // Parseval: filtered output energy equals the filtered spectrum energy.
    const auto spec = fft3_centered_real(g, a.values);
    double e_freq = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) e_freq += std::norm(f.response[i] * spec[i]);
    double e_space = 0;
    for (double v : fa.values) e_space += v * v;
    CHECK(e_space == doctest::Approx(e_freq).epsilon(1e-9));
}

TEST_CASE("step filtering is idempotent") {
    GridSpec g{16, 16, 16, 0.3};
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Volume3D a = Volume3D::uniform(g, VolumeKind::ScatteringPotential, 0.0);
    for (auto& v : a.values) v = dist(rng);
    const Filter3D f = make_filter({FilterShape::Step, 0.6, FilterSpec::Unit::CyclesPerUm}, g);
    const Volume3D once = apply_darkfield(a, f);
    Volume3D relabeled = once;
    relabeled.kind = VolumeKind::ScatteringPotential;
    const Volume3D twice = apply_darkfield(relabeled, f);
    for (std::size_t i = 0; i < once.values.size(); ++i)
        CHECK(std::abs(twice.values[i] - once.values[i]) < 1e-9);
}

TEST_CASE("filtered volumes refuse a second filtering pass unrelabeled") {
    GridSpec g{16, 16, 16, 0.3};
    Volume3D a = Volume3D::uniform(g, VolumeKind::Filtered, 0.0);
    const Filter3D f = make_filter({FilterShape::Step, 0.6, FilterSpec::Unit::CyclesPerUm}, g);
    CHECK_THROWS_AS(apply_darkfield(a, f), ConfigError);
    Volume3D b = Volume3D::uniform(GridSpec{32, 32, 32, 0.3}, VolumeKind::ScatteringPotential, 0.0);
    CHECK_THROWS_AS(apply_darkfield(b, f), ConfigError);
}

TEST_CASE("ODT support has the expected lateral extent") {
    GridSpec g{64, 64, 64, 0.1};
    OpticalConfig cfg = matched_na_config();
    const SupportMask3D mask = make_ctf_support(cfg, g, Modality::ODT);
    double max_xi = 0;
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                if (mask.mask[g.index(ix, iy, iz)])
                    max_xi = std::max(max_xi, std::abs(frequency_coordinate(g, ix, iy, iz)[0]));
    const double expected = (cfg.na_condenser + cfg.na_objective) / cfg.wavelength_vacuum;
    CHECK(std::abs(max_xi - expected) <= g.freq_step_x());
}

TEST_CASE("ODT-family supports are Hermitian-symmetric") {
    GridSpec g{32, 32, 32, 0.15};
    OpticalConfig cfg = matched_na_config();
    for (Modality m : {Modality::ODT, Modality::DarkField, Modality::DarkFieldODT,
                       Modality::BrightField}) {
        const SupportMask3D mask =
            make_ctf_support(cfg, g, m, 0.0,
                             m == Modality::DarkFieldODT
                                 ? std::optional<double>(g.freq_step_x())
                                 : std::nullopt);
        for (int iz = 1; iz < g.nz; ++iz)
            for (int iy = 1; iy < g.ny; ++iy)
                for (int ix = 1; ix < g.nx; ++ix)
                    CHECK(mask.mask[g.index(ix, iy, iz)] ==
                          mask.mask[g.index(g.nx - ix, g.ny - iy, g.nz - iz)]);
    }
}

TEST_CASE("dark-field ODT support excludes DC") {
    GridSpec g{32, 32, 32, 0.15};
    OpticalConfig cfg = matched_na_config();
    const SupportMask3D mask =
        make_ctf_support(cfg, g, Modality::DarkFieldODT, 0.0, g.freq_step_x());
    CHECK(mask.mask[g.index(16, 16, 16)] == 0);
}

TEST_CASE("dark-field ODT support is the ODT support minus the centered ball") {
    GridSpec g{32, 32, 32, 0.15};
    OpticalConfig cfg = matched_na_config();
    const double cutoff = 2.0 * g.freq_step_x();
    const SupportMask3D odt = make_ctf_support(cfg, g, Modality::ODT);
    const SupportMask3D df = make_ctf_support(cfg, g, Modality::DarkFieldODT, 0.0, cutoff);
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const bool in_ball = norm3(frequency_coordinate(g, ix, iy, iz)) <= cutoff;
                const std::uint8_t expected =
                    in_ball ? 0 : odt.mask[g.index(ix, iy, iz)];
                CHECK(df.mask[g.index(ix, iy, iz)] == expected);
            }
}

TEST_CASE("support construction validates modality parameters") {
    GridSpec g{16, 16, 16, 0.2};
    OpticalConfig cfg = matched_na_config();
    CHECK_THROWS_AS(make_ctf_support(cfg, g, Modality::DarkFieldODT), ConfigError);
}

TEST_CASE("QPI support is a single cap in the upper half space") {
    GridSpec g{32, 32, 32, 0.15};
    OpticalConfig cfg = matched_na_config();
    const SupportMask3D mask = make_ctf_support(cfg, g, Modality::QPI);
    std::size_t count = 0;
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                if (mask.mask[g.index(ix, iy, iz)]) {
                    ++count;
                    // cap of K = k_det - (0,0,k0): K_z <= 0 up to the
                    // one-voxel closure dilation
                    CHECK(frequency_coordinate(g, ix, iy, iz)[2] <=
                          g.freq_step_z() + 1e-12);
                }
    CHECK(count > 0);
}

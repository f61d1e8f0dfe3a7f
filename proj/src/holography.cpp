#include "odt/holography.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "odt/detail/raw_io.hpp"
#include "odt/fft.hpp"

using nlohmann::json;

namespace odt {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_to_pi(double x) {
    x = std::fmod(x + kPi, kTwoPi);
    if (x < 0) x += kTwoPi;
    return x - kPi;
}

// Sideband (radius k_NAr around the carrier) must stay inside the Nyquist
// square and clear of the |U|^2 autocorrelation baseband (radius 2*k_NAr).
void check_separability(int nx, int ny, double pitch, const std::array<double, 2>& tilt,
                        const OpticalConfig& cfg) {
    (void)nx;
    (void)ny;
    const double k_na = cfg.k_na_r_objective();
    const double ktx = kTwoPi * tilt[0], kty = kTwoPi * tilt[1];
    const double k_nyq = kPi / pitch;
    if (std::hypot(ktx, kty) < 3.0 * k_na)
        throw ConfigError("reference tilt too small: sideband overlaps the baseband");
    if (std::abs(ktx) + k_na > k_nyq || std::abs(kty) + k_na > k_nyq)
        throw ConfigError("reference tilt too large: sideband leaves the Nyquist square");
}

}  // namespace

Interferogram synthesize_interferogram(const ComplexField2D& sample, const OpticalConfig& cfg,
                                       const std::array<double, 2>& tilt,
                                       double ref_amplitude) {
    check_separability(sample.nx, sample.ny, sample.pitch, tilt, cfg);
    Interferogram holo;
    holo.nx = sample.nx;
    holo.ny = sample.ny;
    holo.pitch = sample.pitch;
    holo.reference_tilt = tilt;
    holo.k_illum = sample.k_illum;
    holo.intensity.resize(sample.values.size());
    for (int iy = 0; iy < sample.ny; ++iy) {
        const double y = (iy - sample.ny / 2) * sample.pitch;
        for (int ix = 0; ix < sample.nx; ++ix) {
            const double x = (ix - sample.nx / 2) * sample.pitch;
            const cplx ref =
                ref_amplitude * std::exp(cplx(0.0, kTwoPi * (tilt[0] * x + tilt[1] * y)));
            holo.intensity[holo.index(ix, iy)] =
                std::norm(sample.values[sample.index(ix, iy)] + ref);
        }
    }
    return holo;
}

ComplexField2D retrieve_field(const Interferogram& holo, const OpticalConfig& cfg) {
    check_separability(holo.nx, holo.ny, holo.pitch, holo.reference_tilt, cfg);
    const int nx = holo.nx, ny = holo.ny;
    std::vector<cplx> buf(holo.intensity.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = cplx(holo.intensity[i], 0.0);
    std::vector<cplx> spec = fft2_centered(nx, ny, buf);

    const double fx = 1.0 / (nx * holo.pitch), fy = 1.0 / (ny * holo.pitch);
    const int cx = static_cast<int>(std::lround(holo.reference_tilt[0] / fx));
    const int cy = static_cast<int>(std::lround(holo.reference_tilt[1] / fy));
    const double k_na = cfg.k_na_r_objective();

    // Sideband SNR gate: peak inside the crop disc vs. the baseband peak.
    double side_max = 0.0, base_max = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double kx = kTwoPi * (ix - nx / 2) * fx;
            const double ky = kTwoPi * (iy - ny / 2) * fy;
            const double m = std::abs(spec[static_cast<std::size_t>(iy) * nx + ix]);
            base_max = std::max(base_max, m);
            // The conj(R)*U sideband is centered at minus the carrier.
            const double dx = kx + kTwoPi * holo.reference_tilt[0];
            const double dy = ky + kTwoPi * holo.reference_tilt[1];
            if (dx * dx + dy * dy <= k_na * k_na) side_max = std::max(side_max, m);
        }
    if (side_max < 1e-6 * base_max)
        throw NumericError("sideband energy below noise floor: no sample beam detected");

    // Crop the sideband disc and recentre it at DC (integer-bin shift).
    std::vector<cplx> cropped(spec.size(), cplx(0.0, 0.0));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int sx = ix - cx;  // source bin in the conj(R)*U sideband
            const int sy = iy - cy;
            if (sx < 0 || sx >= nx || sy < 0 || sy >= ny) continue;
            const double kx = kTwoPi * (ix - nx / 2) * fx;
            const double ky = kTwoPi * (iy - ny / 2) * fy;
            if (kx * kx + ky * ky > k_na * k_na) continue;
            cropped[static_cast<std::size_t>(iy) * nx + ix] =
                spec[static_cast<std::size_t>(sy) * nx + sx];
        }

    ComplexField2D field;
    field.nx = nx;
    field.ny = ny;
    field.pitch = holo.pitch;
    field.k_illum = holo.k_illum;
    field.values = ifft2_centered(nx, ny, cropped);

    // Deterministic global-phase normalization: complex mean over the
    // lowest-10%-gradient pixels rotated to the positive real axis.
    std::vector<double> grad(field.values.size(), 0.0);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            double g = 0.0;
            const cplx v = field.values[field.index(ix, iy)];
            if (ix + 1 < nx) g += std::abs(field.values[field.index(ix + 1, iy)] - v);
            if (iy + 1 < ny) g += std::abs(field.values[field.index(ix, iy + 1)] - v);
            grad[field.index(ix, iy)] = g;
        }
    std::vector<double> sorted = grad;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 10, sorted.end());
    const double cutoff = sorted[sorted.size() / 10];
    cplx mean(0.0, 0.0);
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (grad[i] <= cutoff) mean += field.values[i];
    if (std::abs(mean) > 0) {
        const cplx rot = std::conj(mean) / std::abs(mean);
        for (auto& v : field.values) v *= rot;
    }
    return field;
}

UnwrapResult unwrap_phase(int nx, int ny, const std::vector<double>& wrapped) {
    if (static_cast<std::size_t>(nx) * ny != wrapped.size())
        throw ConfigError("wrapped phase dims do not match payload");
    UnwrapResult result;
    result.phase = wrapped;
    auto& phi = result.phase;
    auto at = [&](int ix, int iy) -> double& {
        return phi[static_cast<std::size_t>(iy) * nx + ix];
    };

    // Residues: nonzero wrapped-gradient sums around elementary 2x2 loops.
    for (int iy = 0; iy + 1 < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const double s = wrap_to_pi(at(ix + 1, iy) - at(ix, iy)) +
                             wrap_to_pi(at(ix + 1, iy + 1) - at(ix + 1, iy)) +
                             wrap_to_pi(at(ix, iy + 1) - at(ix + 1, iy + 1)) +
                             wrap_to_pi(at(ix, iy) - at(ix, iy + 1));
            if (std::abs(s) > 1e-6) ++result.residue_count;
        }

    // Pixel reliability from second differences (smaller = better).
    const double kBad = 1e9;
    std::vector<double> rel(wrapped.size(), kBad);
    for (int iy = 1; iy + 1 < ny; ++iy)
        for (int ix = 1; ix + 1 < nx; ++ix) {
            const double h = wrap_to_pi(at(ix - 1, iy) - at(ix, iy)) -
                             wrap_to_pi(at(ix, iy) - at(ix + 1, iy));
            const double v = wrap_to_pi(at(ix, iy - 1) - at(ix, iy)) -
                             wrap_to_pi(at(ix, iy) - at(ix, iy + 1));
            const double d1 = wrap_to_pi(at(ix - 1, iy - 1) - at(ix, iy)) -
                              wrap_to_pi(at(ix, iy) - at(ix + 1, iy + 1));
            const double d2 = wrap_to_pi(at(ix + 1, iy - 1) - at(ix, iy)) -
                              wrap_to_pi(at(ix, iy) - at(ix - 1, iy + 1));
            rel[static_cast<std::size_t>(iy) * nx + ix] =
                std::sqrt(h * h + v * v + d1 * d1 + d2 * d2);
        }

    struct Edge {
        double reliability;  // sum of endpoint reliabilities
        int a, b;            // flat pixel indices
    };
    std::vector<Edge> edges;
    edges.reserve(2 * wrapped.size());
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int p = iy * nx + ix;
            if (ix + 1 < nx) edges.push_back({rel[p] + rel[p + 1], p, p + 1});
            if (iy + 1 < ny) edges.push_back({rel[p] + rel[p + nx], p, p + nx});
        }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
        return l.reliability < r.reliability;
    });

    // Group merging: the smaller group's pixels are shifted by the 2*pi
    // multiple implied by the joining edge.
    std::vector<int> head(wrapped.size()), next(wrapped.size(), -1), last(wrapped.size()),
        size(wrapped.size(), 1);
    std::iota(head.begin(), head.end(), 0);
    std::iota(last.begin(), last.end(), 0);
    for (const Edge& e : edges) {
        int ga = head[e.a], gb = head[e.b];
        if (ga == gb) continue;
        const double diff = phi[e.a] - phi[e.b];
        const double k = std::round(diff / kTwoPi);
        if (size[ga] < size[gb]) {
            // Shift group a onto b's sheet.
            for (int p = ga; p != -1; p = next[p]) {
                phi[p] -= kTwoPi * k;
                head[p] = gb;
            }
            next[last[gb]] = ga;
            last[gb] = last[ga];
            size[gb] += size[ga];
        } else {
            for (int p = gb; p != -1; p = next[p]) {
                phi[p] += kTwoPi * k;
                head[p] = ga;
            }
            next[last[ga]] = gb;
            last[ga] = last[gb];
            size[ga] += size[gb];
        }
    }
    return result;
}

RytovField rytov_transform(const ComplexField2D& sample, const Vec3& k_illum) {
    const int nx = sample.nx, ny = sample.ny;
    std::vector<double> amps(sample.values.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = std::abs(sample.values[i]);
    std::vector<double> sorted = amps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double floor = 1e-6 * sorted[sorted.size() / 2];
    std::size_t below = 0;
    for (double a : amps)
        if (a <= floor) ++below;
    if (below > 0)
        throw NumericError("rytov transform: " + std::to_string(below) +
                           " pixels at or below the amplitude floor");

    // Divide out the illumination carrier, then unwrap the residual phase.
    std::vector<double> wrapped(sample.values.size());
    std::vector<double> logamp(sample.values.size());
    for (int iy = 0; iy < ny; ++iy) {
        const double y = (iy - ny / 2) * sample.pitch;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = (ix - nx / 2) * sample.pitch;
            const cplx ui = std::exp(cplx(0.0, k_illum[0] * x + k_illum[1] * y));
            const cplx ratio = sample.values[sample.index(ix, iy)] * std::conj(ui);
            wrapped[sample.index(ix, iy)] = std::arg(ratio);
            logamp[sample.index(ix, iy)] = std::log(std::abs(ratio));
        }
    }
    UnwrapResult unwrapped = unwrap_phase(nx, ny, wrapped);

    // Pin the global 2*pi sheet: the background (median) phase is near 0.
    std::vector<double> med = unwrapped.phase;
    std::nth_element(med.begin(), med.begin() + med.size() / 2, med.end());
    const double offset = kTwoPi * std::round(med[med.size() / 2] / kTwoPi);

    RytovField out;
    out.nx = nx;
    out.ny = ny;
    out.pitch = sample.pitch;
    out.k_illum = k_illum;
    out.values.resize(sample.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = cplx(logamp[i], unwrapped.phase[i] - offset);
        if (!std::isfinite(out.values[i].real()) || !std::isfinite(out.values[i].imag()))
            throw NumericError("rytov field contains non-finite values");
    }
    return out;
}

void write_interferogram_stack(const std::string& path,
                               const std::vector<Interferogram>& stack) {
    if (stack.empty()) throw ConfigError("cannot write an empty interferogram stack");
    const int nx = stack[0].nx, ny = stack[0].ny;
    const double pitch = stack[0].pitch;
    json frames = json::array();
    for (const auto& h : stack) {
        if (h.nx != nx || h.ny != ny || h.pitch != pitch)
            throw ConfigError("interferogram frames must share dims and pitch");
        if (h.intensity.size() != static_cast<std::size_t>(nx) * ny)
            throw FormatError("interferogram payload length does not match dims");
        frames.push_back(
            json{{"k_illum", {h.k_illum[0], h.k_illum[1], h.k_illum[2]}},
                 {"tilt", {h.reference_tilt[0], h.reference_tilt[1]}}});
    }
    json header{{"format", "odt-holograms"}, {"version", 1}, {"endianness", "little"},
                {"dtype", "f32"},            {"nx", nx},     {"ny", ny},
                {"pitch_um", pitch},         {"frames", frames}};
    std::vector<float> payload;
    payload.reserve(static_cast<std::size_t>(nx) * ny * stack.size());
    for (const auto& h : stack)
        for (double v : h.intensity) payload.push_back(static_cast<float>(v));
    detail::write_header_payload(path, header, payload);
}

std::vector<Interferogram> read_interferogram_stack(const std::string& path) {
    std::vector<float> payload;
    json h = detail::read_header_payload(path, payload);
    detail::check_common_header(h, "odt-holograms");
    const int nx = h.at("nx").get<int>(), ny = h.at("ny").get<int>();
    const double pitch = h.at("pitch_um").get<double>();
    const auto& frames = h.at("frames");
    const std::size_t per = static_cast<std::size_t>(nx) * ny;
    if (payload.size() != per * frames.size())
        throw FormatError("interferogram payload length does not match declared frames");
    std::vector<Interferogram> stack;
    std::size_t off = 0;
    for (const auto& fr : frames) {
        Interferogram holo;
        holo.nx = nx;
        holo.ny = ny;
        holo.pitch = pitch;
        const auto& k = fr.at("k_illum");
        holo.k_illum = {k.at(0).get<double>(), k.at(1).get<double>(), k.at(2).get<double>()};
        const auto& t = fr.at("tilt");
        holo.reference_tilt = {t.at(0).get<double>(), t.at(1).get<double>()};
        holo.intensity.resize(per);
        for (std::size_t i = 0; i < per; ++i) {
            if (payload[off] < 0) throw FormatError("interferogram intensity is negative");
            holo.intensity[i] = payload[off++];
        }
        stack.push_back(std::move(holo));
    }
    return stack;
}

}  // namespace odt

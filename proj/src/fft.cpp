#include "odt/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace odt {
namespace {

std::mutex g_fftw_mutex;

// Centered-DC <-> FFTW wrap-around layout. For even n the shift is n/2 on
// each axis and is its own inverse.
void shift3(const GridSpec& g, const std::vector<cplx>& in, std::vector<cplx>& out) {
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    for (int iz = 0; iz < nz; ++iz) {
        const int jz = (iz + nz / 2) % nz;
        for (int iy = 0; iy < ny; ++iy) {
            const int jy = (iy + ny / 2) % ny;
            const std::size_t row_in = (static_cast<std::size_t>(iz) * ny + iy) * nx;
            const std::size_t row_out = (static_cast<std::size_t>(jz) * ny + jy) * nx;
            for (int ix = 0; ix < nx; ++ix)
                out[row_out + (ix + nx / 2) % nx] = in[row_in + ix];
        }
    }
}

void shift2(int nx, int ny, const std::vector<cplx>& in, std::vector<cplx>& out) {
    for (int iy = 0; iy < ny; ++iy) {
        const int jy = (iy + ny / 2) % ny;
        for (int ix = 0; ix < nx; ++ix)
            out[static_cast<std::size_t>(jy) * nx + (ix + nx / 2) % nx] =
                in[static_cast<std::size_t>(iy) * nx + ix];
    }
}

std::vector<cplx> run3(const GridSpec& g, const std::vector<cplx>& in, int sign) {
    std::vector<cplx> buf(in.size()), out(in.size());
    shift3(g, in, buf);
    {
        std::lock_guard lock(g_fftw_mutex);
        fftw_plan plan = fftw_plan_dft_3d(
            g.nz, g.ny, g.nx,
            reinterpret_cast<fftw_complex*>(buf.data()),
            reinterpret_cast<fftw_complex*>(buf.data()),
            sign, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
    for (auto& v : buf) v *= scale;
    shift3(g, buf, out);
    return out;
}

std::vector<cplx> run2(int nx, int ny, const std::vector<cplx>& in, int sign) {
    std::vector<cplx> buf(in.size()), out(in.size());
    shift2(nx, ny, in, buf);
    {
        std::lock_guard lock(g_fftw_mutex);
        fftw_plan plan = fftw_plan_dft_2d(
            ny, nx,
            reinterpret_cast<fftw_complex*>(buf.data()),
            reinterpret_cast<fftw_complex*>(buf.data()),
            sign, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
    for (auto& v : buf) v *= scale;
    shift2(nx, ny, buf, out);
    return out;
}

}  // namespace

std::vector<cplx> fft3_centered(const GridSpec& grid, const std::vector<cplx>& in) {
    return run3(grid, in, FFTW_FORWARD);
}

std::vector<cplx> ifft3_centered(const GridSpec& grid, const std::vector<cplx>& in) {
    return run3(grid, in, FFTW_BACKWARD);
}

std::vector<cplx> fft3_centered_real(const GridSpec& grid, const std::vector<double>& in) {
    std::vector<cplx> tmp(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) tmp[i] = cplx(in[i], 0.0);
    return run3(grid, tmp, FFTW_FORWARD);
}

std::vector<cplx> fft2_centered(int nx, int ny, const std::vector<cplx>& in) {
    return run2(nx, ny, in, FFTW_FORWARD);
}

std::vector<cplx> ifft2_centered(int nx, int ny, const std::vector<cplx>& in) {
    return run2(nx, ny, in, FFTW_BACKWARD);
}

}  // namespace odt

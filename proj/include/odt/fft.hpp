#pragma once

#include <vector>

#include "odt/types.hpp"

namespace odt {

// Unitary FFTs under the centered-DC layout: DC at index n/2 on each axis
// for both real-space and frequency-space arrays. Parseval holds without
// scale bookkeeping. All calls are serialized internally (FFTW planning is
// not thread safe).

// 3D, sizes from grid.
std::vector<cplx> fft3_centered(const GridSpec& grid, const std::vector<cplx>& in);
std::vector<cplx> ifft3_centered(const GridSpec& grid, const std::vector<cplx>& in);
std::vector<cplx> fft3_centered_real(const GridSpec& grid, const std::vector<double>& in);

// 2D, row-major ny x nx.
std::vector<cplx> fft2_centered(int nx, int ny, const std::vector<cplx>& in);
std::vector<cplx> ifft2_centered(int nx, int ny, const std::vector<cplx>& in);

}  // namespace odt

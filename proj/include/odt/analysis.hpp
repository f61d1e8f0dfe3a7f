#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odt/types.hpp"

namespace odt {

// Zero-mean normalized (Pearson) cross-correlation over all voxels.
double ncc(const Volume3D& a, const Volume3D& b);

// Mean squared value outside the object mask dilated by `guard_voxels`;
// quantifies filter ringing in the exterior shell.
double ringing_energy(const Volume3D& vol, const std::vector<std::uint8_t>& object_mask,
                      int guard_voxels);

enum class SlicePlane { XY, XZ, YZ };

// 8-bit grayscale binary PGM plus a text sidecar recording the linear
// value-to-gray mapping. Degenerate ranges map to mid-gray 128.
void export_slice(const Volume3D& vol, SlicePlane plane, int index,
                  const std::string& path,
                  std::optional<std::pair<double, double>> value_range = std::nullopt);

}  // namespace odt

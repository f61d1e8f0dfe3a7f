#pragma once

#include <string>
#include <vector>

#include "odt/types.hpp"

namespace odt {

// On-disk layout (all formats): one line of JSON (UTF-8, '\n'-terminated)
// followed by a raw little-endian float32 payload. Complex data is
// interleaved re/im. Writes go to a temp file in the target directory and
// are renamed into place. Exact byte layout documented in the README.

void write_volume(const std::string& path, const Volume3D& vol);
Volume3D read_volume(const std::string& path);

void write_spectrum(const std::string& path, const Spectrum3D& spec);
Spectrum3D read_spectrum(const std::string& path);

// A stack of complex 2D frames sharing dims/pitch; the header lists the
// per-frame illumination wavevector.
void write_field_stack(const std::string& path, const std::vector<ComplexField2D>& fields);
std::vector<ComplexField2D> read_field_stack(const std::string& path);

}  // namespace odt

// io.hpp -- field serialization: VTK legacy ASCII and raw binary with header
#pragma once

#include <string>

#include "mbi/grid.hpp"

namespace mbi {

// VTK legacy "STRUCTURED_POINTS" ASCII, one dataset per file. Portable and
// loadable by standard visualization tools; not meant for lossless round
// trips (use the raw format for that).
void write_vtk(const ScalarField& f, const std::string& path,
               const std::string& name);
void write_vtk(const VectorField3& v, const std::string& path,
               const std::string& name);

// Raw little-endian binary: 64-byte header (magic "MBIF", version, dims,
// component count, spacing, origin) followed by ncomp contiguous float64
// arrays in node order. Write -> read is bit-identical.
void write_raw(const ScalarField& f, const std::string& path);
void write_raw(const VectorField3& v, const std::string& path);
ScalarField read_raw_scalar(const std::string& path);
VectorField3 read_raw_vector(const std::string& path);

}  // namespace mbi

#include "mbi/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace mbi {

namespace {

void vtk_header(std::FILE* fp, const GridSpec& g, const char* title) {
  std::fprintf(fp, "# vtk DataFile Version 3.0\n%s\nASCII\n", title);
  std::fprintf(fp, "DATASET STRUCTURED_POINTS\n");
  std::fprintf(fp, "DIMENSIONS %d %d %d\n", g.nx(), g.ny(), g.nz());
  std::fprintf(fp, "ORIGIN %.17g %.17g %.17g\n", g.origin[0], g.origin[1],
               g.origin[2]);
  std::fprintf(fp, "SPACING %.17g %.17g %.17g\n", g.spacing, g.spacing,
               g.spacing);
  std::fprintf(fp, "POINT_DATA %zu\n", g.node_count());
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

std::unique_ptr<std::FILE, FileCloser> open_or_throw(const std::string& path,
                                                     const char* mode) {
  std::FILE* fp = std::fopen(path.c_str(), mode);
  if (!fp) throw std::runtime_error("cannot open " + path);
  return std::unique_ptr<std::FILE, FileCloser>(fp);
}

}  // namespace

// VTK expects x to vary fastest; our arrays vary z fastest, so emit in
// VTK's order explicitly.
void write_vtk(const ScalarField& f, const std::string& path,
               const std::string& name) {
  auto fp = open_or_throw(path, "w");
  vtk_header(fp.get(), f.grid, name.c_str());
  std::fprintf(fp.get(), "SCALARS %s double 1\nLOOKUP_TABLE default\n",
               name.c_str());
  const GridSpec& g = f.grid;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        std::fprintf(fp.get(), "%.17g\n", f.at(i, j, k));
}

void write_vtk(const VectorField3& v, const std::string& path,
               const std::string& name) {
  auto fp = open_or_throw(path, "w");
  vtk_header(fp.get(), v.grid, name.c_str());
  std::fprintf(fp.get(), "VECTORS %s double\n", name.c_str());
  const GridSpec& g = v.grid;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const Vec3 w = v.at(i, j, k);
        std::fprintf(fp.get(), "%.17g %.17g %.17g\n", w.x, w.y, w.z);
      }
}

namespace {

#pragma pack(push, 1)
struct RawHeader {
  char magic[4];       // "MBIF"
  std::uint32_t version;
  std::uint32_t dims[3];
  std::uint32_t ncomp;
  double spacing;
  double origin[3];
  char pad[8];
};
#pragma pack(pop)
static_assert(sizeof(RawHeader) == 64, "raw header must be exactly 64 bytes");

RawHeader make_header(const GridSpec& g, std::uint32_t ncomp) {
  RawHeader h{};
  std::memcpy(h.magic, "MBIF", 4);
  h.version = 1;
  for (int a = 0; a < 3; ++a) h.dims[a] = std::uint32_t(g.dims[a]);
  h.ncomp = ncomp;
  h.spacing = g.spacing;
  for (int a = 0; a < 3; ++a) h.origin[a] = g.origin[a];
  return h;
}

RawHeader read_header(std::istream& in, const std::string& path) {
  RawHeader h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in || std::memcmp(h.magic, "MBIF", 4) != 0)
    throw std::runtime_error(path + ": not a raw field file");
  if (h.version != 1)
    throw std::runtime_error(path + ": unsupported raw version");
  return h;
}

GridSpec grid_from_header(const RawHeader& h) {
  GridSpec g;
  for (int a = 0; a < 3; ++a) g.dims[a] = int(h.dims[a]);
  g.spacing = h.spacing;
  for (int a = 0; a < 3; ++a) g.origin[a] = h.origin[a];
  return g;
}

}  // namespace

void write_raw(const ScalarField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const RawHeader h = make_header(f.grid, 1);
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(reinterpret_cast<const char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_raw(const VectorField3& v, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const RawHeader h = make_header(v.grid, 3);
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  for (int c = 0; c < 3; ++c)
    out.write(reinterpret_cast<const char*>(v.component(c).data()),
              std::streamsize(v.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

ScalarField read_raw_scalar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  const RawHeader h = read_header(in, path);
  if (h.ncomp != 1) throw std::runtime_error(path + ": expected 1 component");
  ScalarField f(grid_from_header(h));
  in.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(f.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error(path + ": truncated data");
  return f;
}

VectorField3 read_raw_vector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  const RawHeader h = read_header(in, path);
  if (h.ncomp != 3) throw std::runtime_error(path + ": expected 3 components");
  VectorField3 v(grid_from_header(h));
  for (int c = 0; c < 3; ++c)
    in.read(reinterpret_cast<char*>(v.component(c).data()),
            std::streamsize(v.size() * sizeof(double)));
  if (!in) throw std::runtime_error(path + ": truncated data");
  return v;
}

}  // namespace mbi

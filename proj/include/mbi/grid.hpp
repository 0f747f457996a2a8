// grid.hpp -- uniform 3D grid container for scalar and vector fields
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbi {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  double norm() const;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Uniform collocated grid: cubic cells of side `spacing`, node (i,j,k) at
/// origin + spacing*(i,j,k).
struct GridSpec {
  std::array<int, 3> dims{8, 8, 8};
  double spacing = 1.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  static constexpr std::size_t kDefaultNodeCap = std::size_t(1) << 24;

  int nx() const { return dims[0]; }
  int ny() const { return dims[1]; }
  int nz() const { return dims[2]; }
  std::size_t node_count() const {
    return std::size_t(dims[0]) * std::size_t(dims[1]) * std::size_t(dims[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * dims[1] + j) * dims[2] + k;
  }
  Vec3 position(int i, int j, int k) const {
    return {origin[0] + spacing * i, origin[1] + spacing * j,
            origin[2] + spacing * k};
  }
  /// Largest node coordinate per axis (box corner opposite to origin).
  Vec3 corner() const {
    return position(dims[0] - 1, dims[1] - 1, dims[2] - 1);
  }

  bool operator==(const GridSpec& o) const {
    return dims == o.dims && spacing == o.spacing && origin == o.origin;
  }

  void validate(std::size_t node_cap = kDefaultNodeCap) const;
};

struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g) : grid(g), values(g.node_count(), 0.0) {}

  double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
  std::size_t size() const { return values.size(); }
};

/// Three component fields stored as separate contiguous arrays.
struct VectorField3 {
  GridSpec grid;
  std::vector<double> x, y, z;

  VectorField3() = default;
  explicit VectorField3(const GridSpec& g)
      : grid(g),
        x(g.node_count(), 0.0),
        y(g.node_count(), 0.0),
        z(g.node_count(), 0.0) {}

  Vec3 at(int i, int j, int k) const {
    const std::size_t n = grid.index(i, j, k);
    return {x[n], y[n], z[n]};
  }
  void set(int i, int j, int k, const Vec3& v) {
    const std::size_t n = grid.index(i, j, k);
    x[n] = v.x;
    y[n] = v.y;
    z[n] = v.z;
  }
  std::size_t size() const { return x.size(); }
  std::vector<double>& component(int c) { return c == 0 ? x : (c == 1 ? y : z); }
  const std::vector<double>& component(int c) const {
    return c == 0 ? x : (c == 1 ? y : z);
  }
};

/// Computable surrogate for a C^{1,alpha} norm: sup of |v|, sup of the
/// Jacobian entries, and a Hoelder seminorm of the Jacobian sampled at
/// dyadic node separations. `total` is the sum of the three parts.
struct NormEstimate {
  double sup_value = 0.0;
  double sup_gradient = 0.0;
  double holder_seminorm = 0.0;
  double alpha = 0.5;
  double total = 0.0;
};

}  // namespace mbi

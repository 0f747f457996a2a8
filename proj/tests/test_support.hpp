// test_support.hpp -- shared field builders for the test suites
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "mbi/grid.hpp"
#include "mbi/ops.hpp"

namespace mbi::testing {

inline GridSpec cube_grid(int n, double half_extent) {
  GridSpec g;
  g.dims = {n, n, n};
  g.spacing = 2.0 * half_extent / (n - 1);
  g.origin = {-half_extent, -half_extent, -half_extent};
  return g;
}

inline ScalarField sample_scalar(const GridSpec& g,
                                 const std::function<double(Vec3)>& f) {
  ScalarField s(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nz(); ++k) s.at(i, j, k) = f(g.position(i, j, k));
  return s;
}

inline VectorField3 sample_vector(const GridSpec& g,
                                  const std::function<Vec3(Vec3)>& f) {
  VectorField3 v(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nz(); ++k) v.set(i, j, k, f(g.position(i, j, k)));
  return v;
}

// C^infinity bump exp(1 - 1/(1 - |x/w|^2)) inside radius w, 0 outside.
inline double bump(Vec3 p, double w) {
  const double r2 = p.norm2() / (w * w);
  if (r2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r2));
}

inline ScalarField random_scalar(const GridSpec& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField s(g);
  for (double& v : s.values) v = u(rng);
  return s;
}

inline VectorField3 random_vector(const GridSpec& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorField3 v(g);
  for (double& x : v.x) x = u(rng);
  for (double& x : v.y) x = u(rng);
  for (double& x : v.z) x = u(rng);
  return v;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n)
    m = std::max(m, std::abs(a.values[n] - b.values[n]));
  return m;
}

inline double max_diff(const VectorField3& a, const VectorField3& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    m = std::max(m, std::abs(a.x[n] - b.x[n]));
    m = std::max(m, std::abs(a.y[n] - b.y[n]));
    m = std::max(m, std::abs(a.z[n] - b.z[n]));
  }
  return m;
}

}  // namespace mbi::testing

#include "mbi/ops.hpp"

#include <algorithm>
#include <cmath>

namespace mbi {

double Vec3::norm() const { return std::sqrt(norm2()); }

void GridSpec::validate(std::size_t node_cap) const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 8)
      throw std::invalid_argument("grid: dims must be >= 8 per axis");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw std::invalid_argument("grid: spacing must be finite and positive");
  for (double c : origin) {
    if (!std::isfinite(c)) throw std::invalid_argument("grid: origin not finite");
  }
  if (node_count() > node_cap)
    throw std::invalid_argument("grid: node count exceeds cap (" +
                                std::to_string(node_cap) + ")");
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

namespace {

// d/dx_axis of a nodal array, second order everywhere.
// Central at interior nodes, one-sided three-point at the two faces.
void derivative_axis(const GridSpec& g, const std::vector<double>& f,
                     int axis, std::vector<double>& out) {
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  const double inv2h = 1.0 / (2.0 * g.spacing);
  const std::ptrdiff_t stride[3] = {std::ptrdiff_t(ny) * nz, nz, 1};
  const int n_axis[3] = {nx, ny, nz};
  const std::ptrdiff_t s = stride[axis];
  const int na = n_axis[axis];

#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      for (int k = 0; k < nz; ++k) {
        const std::size_t n = g.index(i, j, k);
        const int ia = (axis == 0) ? i : (axis == 1) ? j : k;
        double d;
        if (ia == 0) {
          d = (-3.0 * f[n] + 4.0 * f[n + s] - f[n + 2 * s]) * inv2h;
        } else if (ia == na - 1) {
          d = (3.0 * f[n] - 4.0 * f[n - s] + f[n - 2 * s]) * inv2h;
        } else {
          d = (f[n + s] - f[n - s]) * inv2h;
        }
        out[n] = d;
      }
    }
  }
}

}  // namespace

VectorField3 gradient(const ScalarField& f) {
  VectorField3 g(f.grid);
  derivative_axis(f.grid, f.values, 0, g.x);
  derivative_axis(f.grid, f.values, 1, g.y);
  derivative_axis(f.grid, f.values, 2, g.z);
  return g;
}

ScalarField divergence(const VectorField3& v) {
  ScalarField d(v.grid);
  std::vector<double> tmp(v.size());
  derivative_axis(v.grid, v.x, 0, d.values);
  derivative_axis(v.grid, v.y, 1, tmp);
  for (std::size_t n = 0; n < d.values.size(); ++n) d.values[n] += tmp[n];
  derivative_axis(v.grid, v.z, 2, tmp);
  for (std::size_t n = 0; n < d.values.size(); ++n) d.values[n] += tmp[n];
  return d;
}

VectorField3 curl(const VectorField3& v) {
  VectorField3 c(v.grid);
  std::vector<double> a(v.size()), b(v.size());
  derivative_axis(v.grid, v.z, 1, a);  // dvz/dy
  derivative_axis(v.grid, v.y, 2, b);  // dvy/dz
  for (std::size_t n = 0; n < c.size(); ++n) c.x[n] = a[n] - b[n];
  derivative_axis(v.grid, v.x, 2, a);  // dvx/dz
  derivative_axis(v.grid, v.z, 0, b);  // dvz/dx
  for (std::size_t n = 0; n < c.size(); ++n) c.y[n] = a[n] - b[n];
  derivative_axis(v.grid, v.y, 0, a);  // dvy/dx
  derivative_axis(v.grid, v.x, 1, b);  // dvx/dy
  for (std::size_t n = 0; n < c.size(); ++n) c.z[n] = a[n] - b[n];
  return c;
}

std::array<ScalarField, 9> jacobian(const VectorField3& v) {
  std::array<ScalarField, 9> J;
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) {
      ScalarField e(v.grid);
      derivative_axis(v.grid, v.component(c), a, e.values);
      J[a * 3 + c] = std::move(e);
    }
  }
  return J;
}

namespace {

// Hoelder seminorm of a set of entry fields: max over node pairs separated
// by s*h along a coordinate axis, s dyadic, of max-entry difference / (s h)^alpha.
double holder_of_entries(const GridSpec& g,
                         const std::vector<const std::vector<double>*>& entries,
                         double alpha) {
  const int n_axis[3] = {g.nx(), g.ny(), g.nz()};
  const std::ptrdiff_t stride[3] = {std::ptrdiff_t(g.ny()) * g.nz(), g.nz(), 1};
  double best = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int s = 1; s < n_axis[axis]; s *= 2) {
      const double w = 1.0 / std::pow(s * g.spacing, alpha);
      const std::ptrdiff_t shift = s * stride[axis];
      double m = 0.0;
      for (const auto* e : entries) {
        const std::vector<double>& f = *e;
#pragma omp parallel for collapse(2) reduction(max : m) schedule(static)
        for (int i = 0; i < n_axis[0]; ++i) {
          for (int j = 0; j < n_axis[1]; ++j) {
            const int lim0 = (axis == 0) ? n_axis[0] - s : n_axis[0];
            const int lim1 = (axis == 1) ? n_axis[1] - s : n_axis[1];
            if (i >= lim0 || j >= lim1) continue;
            const int lim2 = (axis == 2) ? n_axis[2] - s : n_axis[2];
            for (int k = 0; k < lim2; ++k) {
              const std::size_t n = g.index(i, j, k);
              const double d = std::abs(f[n + shift] - f[n]);
              if (d > m) m = d;
            }
          }
        }
      }
      best = std::max(best, m * w);
    }
  }
  return best;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("proxy_norm: alpha must lie in (0,1)");
}

void check_finite(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("proxy_norm: field has non-finite values");
}

}  // namespace

NormEstimate proxy_norm(const VectorField3& v, double alpha) {
  check_alpha(alpha);
  NormEstimate e;
  e.alpha = alpha;
  double sup = 0.0;
  const std::size_t N = v.size();
#pragma omp parallel for reduction(max : sup) schedule(static)
  for (std::size_t n = 0; n < N; ++n) {
    const double m2 = v.x[n] * v.x[n] + v.y[n] * v.y[n] + v.z[n] * v.z[n];
    if (m2 > sup) sup = m2;
  }
  e.sup_value = std::sqrt(sup);
  check_finite(e.sup_value);

  const auto J = jacobian(v);
  double supg = 0.0;
  std::vector<const std::vector<double>*> entries;
  for (const auto& f : J) {
    entries.push_back(&f.values);
    for (double x : f.values) supg = std::max(supg, std::abs(x));
  }
  e.sup_gradient = supg;
  check_finite(supg);
  e.holder_seminorm = holder_of_entries(v.grid, entries, alpha);
  check_finite(e.holder_seminorm);
  e.total = e.sup_value + e.sup_gradient + e.holder_seminorm;
  return e;
}

NormEstimate proxy_norm(const ScalarField& f, double alpha) {
  check_alpha(alpha);
  NormEstimate e;
  e.alpha = alpha;
  double sup = 0.0;
  for (double x : f.values) sup = std::max(sup, std::abs(x));
  e.sup_value = sup;
  check_finite(sup);

  const VectorField3 g = gradient(f);
  double supg = 0.0;
  std::vector<const std::vector<double>*> entries = {&g.x, &g.y, &g.z};
  for (const auto* c : entries)
    for (double x : *c) supg = std::max(supg, std::abs(x));
  e.sup_gradient = supg;
  check_finite(supg);
  e.holder_seminorm = holder_of_entries(f.grid, entries, alpha);
  check_finite(e.holder_seminorm);
  e.total = e.sup_value + e.sup_gradient + e.holder_seminorm;
  return e;
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField r(a.grid);
  for (std::size_t n = 0; n < r.values.size(); ++n)
    r.values[n] = a.values[n] + b.values[n];
  return r;
}

VectorField3 add(const VectorField3& a, const VectorField3& b) {
  require_same_grid(a.grid, b.grid);
  VectorField3 r(a.grid);
  for (std::size_t n = 0; n < r.size(); ++n) {
    r.x[n] = a.x[n] + b.x[n];
    r.y[n] = a.y[n] + b.y[n];
    r.z[n] = a.z[n] + b.z[n];
  }
  return r;
}

ScalarField sub(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField r(a.grid);
  for (std::size_t n = 0; n < r.values.size(); ++n)
    r.values[n] = a.values[n] - b.values[n];
  return r;
}

VectorField3 sub(const VectorField3& a, const VectorField3& b) {
  require_same_grid(a.grid, b.grid);
  VectorField3 r(a.grid);
  for (std::size_t n = 0; n < r.size(); ++n) {
    r.x[n] = a.x[n] - b.x[n];
    r.y[n] = a.y[n] - b.y[n];
    r.z[n] = a.z[n] - b.z[n];
  }
  return r;
}

ScalarField scale(const ScalarField& a, double s) {
  ScalarField r = a;
  for (double& x : r.values) x *= s;
  return r;
}

VectorField3 scale(const VectorField3& a, double s) {
  VectorField3 r = a;
  for (double& x : r.x) x *= s;
  for (double& x : r.y) x *= s;
  for (double& x : r.z) x *= s;
  return r;
}

ScalarField dot(const VectorField3& a, const VectorField3& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField r(a.grid);
  for (std::size_t n = 0; n < r.values.size(); ++n)
    r.values[n] = a.x[n] * b.x[n] + a.y[n] * b.y[n] + a.z[n] * b.z[n];
  return r;
}

VectorField3 mul(const ScalarField& f, const VectorField3& v) {
  require_same_grid(f.grid, v.grid);
  VectorField3 r(v.grid);
  for (std::size_t n = 0; n < r.size(); ++n) {
    r.x[n] = f.values[n] * v.x[n];
    r.y[n] = f.values[n] * v.y[n];
    r.z[n] = f.values[n] * v.z[n];
  }
  return r;
}

ScalarField mul(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField r(a.grid);
  for (std::size_t n = 0; n < r.values.size(); ++n)
    r.values[n] = a.values[n] * b.values[n];
  return r;
}

void axpy(VectorField3& b, double s, const VectorField3& a) {
  require_same_grid(a.grid, b.grid);
  for (std::size_t n = 0; n < b.size(); ++n) {
    b.x[n] += s * a.x[n];
    b.y[n] += s * a.y[n];
    b.z[n] += s * a.z[n];
  }
}

void axpy(ScalarField& b, double s, const ScalarField& a) {
  require_same_grid(a.grid, b.grid);
  for (std::size_t n = 0; n < b.values.size(); ++n)
    b.values[n] += s * a.values[n];
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const VectorField3& v) {
  double m = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double m2 = v.x[n] * v.x[n] + v.y[n] * v.y[n] + v.z[n] * v.z[n];
    if (m2 > m) m = m2;
  }
  return std::sqrt(m);
}

double max_abs_interior(const ScalarField& f, int margin) {
  const GridSpec& g = f.grid;
  double m = 0.0;
  for (int i = margin; i < g.nx() - margin; ++i)
    for (int j = margin; j < g.ny() - margin; ++j)
      for (int k = margin; k < g.nz() - margin; ++k)
        m = std::max(m, std::abs(f.at(i, j, k)));
  return m;
}

double max_abs_interior(const VectorField3& v, int margin) {
  const GridSpec& g = v.grid;
  double m = 0.0;
  for (int i = margin; i < g.nx() - margin; ++i)
    for (int j = margin; j < g.ny() - margin; ++j)
      for (int k = margin; k < g.nz() - margin; ++k)
        m = std::max(m, v.at(i, j, k).norm2());
  return std::sqrt(m);
}

}  // namespace mbi

// potential.hpp -- free-space Newtonian potential and Helmholtz projectors
#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "mbi/grid.hpp"
#include "mbi/ops.hpp"

namespace mbi {

enum class PotentialMethod { direct_sum, fast_transform };

/// Per-call projector diagnostic: fraction of the integrand mass (|div v| for
/// the solenoidal projector, |curl v| for the irrotational one) that sits
/// within two cells of the box boundary. Large values flag fields whose
/// sources are not well contained, so the finite-box projection is suspect.
struct ProjectorDiag {
  double boundary_mass_ratio = 0.0;
};

/// Discrete Newtonian-potential convolution u(x) = sum_y K(x-y) f(y) h^3 with
/// the free-space kernel K = 1/|x-y| and the singular cell replaced by the
/// cell average of 1/|x| (self_cell_constant). direct_sum evaluates the sum
/// literally; fast_transform computes the identical sum by zero-padded FFT.
///
/// The Helmholtz projectors use the lattice-consistent inverse of the
/// composed central-difference operators instead of the 1/r quadrature, so
/// that div(P v) and curl(Q v) vanish to round-off rather than to O(h^2).
class PotentialSolver {
 public:
  explicit PotentialSolver(const GridSpec& grid,
                           PotentialMethod method = PotentialMethod::fast_transform);
  ~PotentialSolver();
  PotentialSolver(const PotentialSolver&) = delete;
  PotentialSolver& operator=(const PotentialSolver&) = delete;

  ScalarField newtonian_potential(const ScalarField& f) const;
  /// -grad of the Newtonian potential of rho; satisfies div D = 4 pi rho.
  VectorField3 coulomb_field(const ScalarField& rho) const;
  /// curl of the componentwise Newtonian potential of j; curl H = 4 pi j for
  /// solenoidal j.
  VectorField3 ampere_field(const VectorField3& j) const;

  VectorField3 project_solenoidal(const VectorField3& v,
                                  ProjectorDiag* diag = nullptr) const;
  VectorField3 project_irrotational(const VectorField3& v,
                                    ProjectorDiag* diag = nullptr) const;

  const GridSpec& grid() const { return grid_; }
  PotentialMethod method() const { return method_; }
  double self_cell_constant() const { return self_cell_constant_; }

  /// Average of 1/|x| over the unit cube centred at the origin (the self-cell
  /// kernel value is this divided by the grid spacing).
  static double unit_cube_inverse_distance_average();

 private:
  struct Impl;
  GridSpec grid_;
  PotentialMethod method_;
  double self_cell_constant_;
  std::unique_ptr<Impl> impl_;

  ScalarField potential_direct(const ScalarField& f) const;
  ScalarField potential_fft(const ScalarField& f) const;
  void check_support(const ScalarField& f) const;
};

}  // namespace mbi

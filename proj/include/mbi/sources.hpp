// sources.hpp -- regular, compactly supported charge and current densities
#pragma once

#include <vector>

#include "mbi/potential.hpp"

namespace mbi {

enum class SourceKind { mollified_ball, truncated_gaussian, ring_current, superposition };

/// Declarative source description. Charge kinds (mollified_ball,
/// truncated_gaussian) produce rho; ring_current produces j; superposition
/// sums its children (which must all be of one class).
struct SourceConfig {
  SourceKind kind = SourceKind::mollified_ball;
  Vec3 center{0, 0, 0};
  double radius = 0.0;        // ball radius or gaussian sigma
  double minor_radius = 0.0;  // ring tube radius
  double major_radius = 0.0;  // ring centerline radius
  double amplitude = 0.0;     // total charge, or loop current for rings
  Vec3 axis{0, 0, 1};         // ring axis
  std::vector<SourceConfig> children;

  bool is_current() const;
  /// Half-extent of the support box around `center` (per axis, conservative).
  double support_extent() const;
  void validate(const GridSpec& grid) const;
};

/// rho sampled from the closed-form profile; the grid quadrature of the
/// result equals `amplitude` up to discretization error.
ScalarField build_charge_density(const SourceConfig& cfg, const GridSpec& grid);

/// Azimuthal tube current around cfg.axis, mollified with a C^1 bump in the
/// tube cross-section; the cross-sectional flux equals `amplitude`.
VectorField3 build_current_density(const SourceConfig& cfg, const GridSpec& grid);

/// Applies the solenoidal projector and reports the divergence residual.
VectorField3 solenoidalize(const VectorField3& j, const PotentialSolver& solver,
                           ProjectorDiag* diag = nullptr);

struct SourcePair {
  ScalarField rho;
  VectorField3 j;
  double rho_total = 0.0;       // grid quadrature of rho
  double j_div_residual = 0.0;  // max |div j| after projection
  double j_change_norm = 0.0;   // relative proxy-norm change from projection
  double boundary_mass = 0.0;   // projector diagnostic for the j projection
};

/// Builds rho from charge-kind configs and j from current-kind configs,
/// projects j onto the solenoidal subspace, and records the diagnostics.
/// `div_tol` defaults to 1e-8 * max|j| / h when negative.
SourcePair make_source_pair(const std::vector<SourceConfig>& configs,
                            const GridSpec& grid, const PotentialSolver& solver,
                            double div_tol = -1.0);

}  // namespace mbi

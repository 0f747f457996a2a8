// series.hpp -- perturbation-series hierarchy for the nonlinear aether law
#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mbi/potential.hpp"

namespace mbi {

/// Maclaurin coefficient M_j of 1/sqrt(1+z): M_0 = 1,
/// M_j = (-1)^j (2j-1)!!/(j! 2^j). Dyadic, hence exact in double for the
/// orders used here (j <= 26).
double maclaurin_coefficient(int j);

/// Enumerates all `slots`-tuples of non-negative integers with the given
/// total. Empty when total < 0. With zero slots yields the empty tuple
/// exactly when total == 0.
class MultiIndexEnumerator {
 public:
  MultiIndexEnumerator(int slots, int total);
  /// Fills `tuple` with the next multi-index; returns false when exhausted.
  bool next(std::vector<int>& tuple);

 private:
  int slots_, total_;
  bool started_ = false, done_ = false;
  std::vector<int> current_;
};

/// Coefficient fields of the expansions D = sum beta^{4k} D^(k),
/// H = sum beta^{4k} H^(k), with D^(0), H^(0) the Coulomb/Ampere seeds,
/// plus the scalar expansion coefficients X^(h), Y^(h) of the aether-law
/// nonlinearity. All lists run 0..order.
struct SeriesState {
  std::vector<VectorField3> D;
  std::vector<VectorField3> H;
  std::vector<ScalarField> X;  // X[0] = -1 everywhere
  std::vector<ScalarField> Y;  // Y[0] = 0 (alignment)
  int order = 0;

  const GridSpec& grid() const { return D.at(0).grid; }
};

/// Memoized dot-product fields between series coefficients:
///   dh(i,j) = D^(i).H^(j)            mp(i,j) = (D-H)^(i).(D+H)^(j)
///   dd(i,j) = D^(i).D^(j)            hh(i,j) = H^(i).H^(j)
/// Entries stay valid as the underlying lists grow by appending.
class DotCache {
 public:
  DotCache(const std::vector<VectorField3>& D, const std::vector<VectorField3>& H)
      : D_(D), H_(H) {}
  const ScalarField& dh(int i, int j);
  const ScalarField& mp(int i, int j);
  const ScalarField& dd(int i, int j);
  const ScalarField& hh(int i, int j);

 private:
  const std::vector<VectorField3>& D_;
  const std::vector<VectorField3>& H_;
  std::map<std::uint64_t, ScalarField> cache_;
};

// Combinatorial evaluation of the expansion coefficients (multi-index sums).
ScalarField compute_Z(int h, int j, int l, DotCache& cache, const GridSpec& grid);
ScalarField compute_X(int h, DotCache& cache, const GridSpec& grid);
ScalarField compute_Y(int h, const std::vector<ScalarField>& X, DotCache& cache,
                      const GridSpec& grid);

/// Scalar weight of the pure-field hierarchies: the electrostatic form sums
/// M_j-weighted products of D-dot-D fields, the magnetostatic form
/// |M_j|-weighted products of H-dot-H fields. Both equal the electromagnetic
/// X^(h) when the other seed vanishes.
ScalarField electrostatic_weight(int h, DotCache& cache, const GridSpec& grid);
ScalarField magnetostatic_weight(int h, DotCache& cache, const GridSpec& grid);

/// Independent oracle: evaluates the same X^(h), Y^(h) by truncated power
/// series arithmetic in t = beta^4 (series product + Newton reciprocal
/// square root), nodewise over the grid.
std::pair<std::vector<ScalarField>, std::vector<ScalarField>> series_oracle_XY(
    const std::vector<VectorField3>& D, const std::vector<VectorField3>& H,
    int order);

enum class EngineMode { em, electrostatic, magnetostatic };
enum class XYMethod { combinatorial, series_algebra };

/// Drives the recursion D^(k) = P sum_h (X^(h) D^(k-h) + Y^(h) H^(k-h)),
/// H^(k) = Q sum_h (X^(h) H^(k-h) - Y^(h) D^(k-h)) and its electrostatic /
/// magnetostatic specialisations. Coefficient fields are stored, never
/// recomputed; the recursion references all lower orders.
class SeriesEngine {
 public:
  SeriesEngine(const PotentialSolver& solver, EngineMode mode,
               VectorField3 seed_D, VectorField3 seed_H,
               XYMethod xy = XYMethod::combinatorial);

  void step();
  void extend_to(int K);

  const SeriesState& state() const { return state_; }
  EngineMode mode() const { return mode_; }
  /// Worst projector boundary-mass ratio seen across all steps so far.
  double max_boundary_mass_ratio() const { return max_boundary_ratio_; }

 private:
  const PotentialSolver& solver_;
  EngineMode mode_;
  XYMethod xy_;
  SeriesState state_;
  DotCache cache_;
  double max_boundary_ratio_ = 0.0;

  void step_em();
  void step_electrostatic();
  void step_magnetostatic();
};

/// Partial sums D = D^(0) + sum_{k=1..K} beta^{4k} D^(k) (same for H).
std::pair<VectorField3, VectorField3> assemble(const SeriesState& st, double beta,
                                               int K = -1);

struct FieldStrengthViolation : std::runtime_error {
  explicit FieldStrengthViolation(std::vector<std::size_t> nodes);
  std::vector<std::size_t> offending_nodes;
};

/// Nodewise aether law: E = (D - b4 (D.H) H)/sqrt(1 + b4(|D|^2-|H|^2) - b8(D.H)^2),
/// B = (H + b4 (D.H) D)/sqrt(same), b4 = beta^4. Throws FieldStrengthViolation
/// if the radicand drops below the positivity margin anywhere.
std::pair<VectorField3, VectorField3> reconstruct_EB(const VectorField3& D,
                                                     const VectorField3& H,
                                                     double beta);

struct ResidualReport {
  double div_D_minus_4pi_rho = 0.0;
  double curl_H_minus_4pi_j = 0.0;
  double curl_E = 0.0;
  double div_B = 0.0;
};

/// Max-norms of the four stationary field-law defects over interior nodes
/// (two cells in from every face, where all stencils are purely central).
ResidualReport residuals(const VectorField3& E, const VectorField3& B,
                         const VectorField3& D, const VectorField3& H,
                         const ScalarField& rho, const VectorField3& j);

struct OrderNormRow {
  int k = 0;
  double measured = 0.0;  // ||D^(k)|| + ||H^(k)|| proxy
  double majorant = 0.0;  // safety * R_k * N^(2k+1)
  bool within = true;
};

/// Norm-chain diagnostic: checks measured N^(k) against the majorant
/// safety * R_k * N^(2k+1) with N the summed seed proxy norm. R_k values are
/// supplied by the caller (exact sequence converted to double).
std::vector<OrderNormRow> norm_chain_report(const SeriesState& st, double alpha,
                                            double safety,
                                            const std::vector<double>& R);

}  // namespace mbi

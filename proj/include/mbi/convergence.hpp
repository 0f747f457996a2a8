// convergence.hpp -- exact majorant sequence, generating-function radius,
// and runnable convergence certificates
#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <vector>

namespace mbi {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Exact majorant data: R_k (R_0 = 1), the integer sequence
/// S_{k+1} = 2^{2k} R_k, and (when produced by the recursion oracle) the
/// scalar-weight bound coefficients C_h (C_0 = 1, C_1 = 1/2, ...).
struct RationalSeq {
  std::vector<Rational> R;
  std::vector<BigInt> S;  // S[k] = S_{k+1} = 2^{2k} R_k
  std::vector<Rational> C;
};

/// Taylor coefficients (exact, indices 0..order) of
/// xi(g) = 2g - (g + g^3) / sqrt(1 - g^2 - g^4) at g = 0.
std::vector<Rational> xi_series_of_g(int order);

/// Compositional inverse G of the series xi (unit slope at 0) by exact Newton
/// iteration on truncated power series; extracts R_k as the coefficient of
/// xi^{2k+1} and checks that every even coefficient vanishes and every
/// S_{k+1} = 2^{2k} R_k is an integer.
RationalSeq invert_series(const std::vector<Rational>& xi_coeffs, int n_terms);

/// R_0..R_n straight from the recursion
///   R_k = sum_{h=1..k} (C_h + sum_{g<h} C_{h-1-g} sum_{a1+a2=g} R_a1 R_a2) R_{k-h}
/// with the C_h assembled from the composition sums of the scalar-weight
/// estimates. Exponential cost; intended as a small-order cross-check of
/// invert_series (a mismatch indicates a transcription bug).
RationalSeq rk_recursion_oracle(int n);

/// Zeros of d(xi)/dg and the resulting radius of convergence of the
/// generating function.
struct CriticalPointReport {
  std::vector<long long> ptilde_coeffs;            // degree-12 expansion, exact
  std::vector<std::complex<double>> roots;         // all 12 zeros of ptilde
  std::vector<double> residuals;                   // |ptilde(root)| after polish
  std::vector<std::complex<double>> genuine_zeros; // the 6 zeros of dxi/dg
  std::vector<double> xi_values;                   // |xi(g0)| per genuine zero
  double radius = 0.0;                             // min of xi_values
  double g_bullet = 0.0;  // real endpoint sqrt((sqrt 5 - 1)/2), informational
};

CriticalPointReport critical_points();

/// (2^{2/3} - 1)^{3/2}: the larger radius valid for the pure electric and
/// pure magnetic hierarchies.
double electrostatic_radius();

struct QRatioReport {
  double q = 0.0;           // 1/radius^2
  double four_q = 0.0;
  int last_index = 0;       // k of the last available ratio R_{k+1}/R_k
  double last_ratio = 0.0;
  double gap = 0.0;         // q - last_ratio
};

/// Asymptotic coefficient ratio: primary value 1/xi*^2 from the critical
/// points, plus the last finite ratio of the supplied sequence as diagnostic.
QRatioReport q_ratio(const RationalSeq& seq);

enum class CertifyMode { em, electrostatic, magnetostatic };

struct Certificate {
  double beta = 0.0;
  double norm_D = 0.0;          // proxy norm of the Coulomb seed
  double norm_H = 0.0;          // proxy norm of the Ampere seed
  double safety = 2.0;          // multiplies the proxy norm before the test
  double x = 0.0;               // beta^2 * applicable proxy norm (raw)
  double x_adjusted = 0.0;      // beta^2 * safety * applicable proxy norm
  double radius_used = 0.0;
  double margin = 0.0;          // radius_used - x_adjusted
  double margin_raw = 0.0;      // radius_used - x
  int K = 0;                    // truncation order the tail bound refers to
  double tail_bound = 0.0;      // finite only when certified
  double boundary_mass = 0.0;
  bool boundary_ok = true;      // boundary_mass <= 1e-3
  bool certified = false;
  std::string mode;
};

/// Decides x_adjusted < radius(mode) and, when certified, bounds the
/// truncation tail by sum_{k>K} R_k x^{2k} N using the exact R_k through
/// k = 29 and the ratio bound R_k < q^k beyond (closed geometric form).
Certificate certify(double beta, double norm_D, double norm_H, int K,
                    CertifyMode mode, double safety = 2.0,
                    double boundary_mass = 0.0);

/// R_0..R_n as doubles (from the exact sequence), for majorant diagnostics.
std::vector<double> majorant_doubles(int n);

/// Fraction/decimal rendering used by the coefficient table printer.
std::string rational_to_string(const Rational& r);

}  // namespace mbi

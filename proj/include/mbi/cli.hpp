// cli.hpp -- command implementations behind the mbi executable
#pragma once

#include <iosfwd>
#include <string>

#include "mbi/config.hpp"
#include "mbi/convergence.hpp"

namespace mbi {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUncertified = 3;
inline constexpr int kExitFieldStrength = 4;
inline constexpr int kExitNumerical = 5;

/// Everything cmd_solve / cmd_certify derive from a config before stepping
/// the series: sources, seed fields, their proxy norms, and the certificate.
struct PreparedRun {
  SourcePair sources;
  VectorField3 D_C;
  VectorField3 H_A;
  NormEstimate norm_D;
  NormEstimate norm_H;
  Certificate certificate;
};

PreparedRun prepare_run(const RunConfig& cfg, const PotentialSolver& solver);

CertifyMode certify_mode(EngineMode m);

/// Prints R_0..R_n (exact fractions or decimals) and S_1..S_{n+1}.
int cmd_coeffs(int n, bool exact, std::ostream& out);

/// Prints the critical-point report, the pure-field radius, and the ratio q.
int cmd_radius(std::ostream& out);

/// Prints the certificate and writes <out_dir>/certificate.json.
int cmd_certify(const RunConfig& cfg, std::ostream& out);

/// Runs the full pipeline and writes fields plus report.json. Refuses to run
/// at an uncertified beta unless `force`.
int cmd_solve(const RunConfig& cfg, bool force, std::ostream& out);

/// Reads fields written by cmd_solve back from cfg.out_dir and recomputes the
/// residual report against the configured sources.
int cmd_verify(const RunConfig& cfg, std::ostream& out);

}  // namespace mbi

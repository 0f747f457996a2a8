#include "mbi/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mbi/io.hpp"

namespace mbi {

using nlohmann::json;

namespace {

constexpr int kCoeffCap = 120;

json certificate_json(const Certificate& c) {
  return json{{"beta", c.beta},
              {"norm_D", c.norm_D},
              {"norm_H", c.norm_H},
              {"safety", c.safety},
              {"x", c.x},
              {"x_adjusted", c.x_adjusted},
              {"radius_used", c.radius_used},
              {"margin", c.margin},
              {"margin_raw", c.margin_raw},
              {"K", c.K},
              {"tail_bound", c.tail_bound},
              {"boundary_mass", c.boundary_mass},
              {"boundary_ok", c.boundary_ok},
              {"mode", c.mode},
              {"verdict", c.certified ? "certified" : "not_certified"},
              {"norm_kind", "grid proxy norm (sup + sup-gradient + sampled "
                            "Hoelder seminorm); an under-estimate of the "
                            "continuum norm, compensated by the safety factor"}};
}

void print_certificate(const Certificate& c, std::ostream& out) {
  out << "certificate (" << c.mode << " mode, proxy norm):\n"
      << "  beta            = " << c.beta << "\n"
      << "  ||D_C||, ||H_A|| = " << c.norm_D << ", " << c.norm_H << "\n"
      << "  x = beta^2 N    = " << c.x << "  (safety-adjusted " << c.x_adjusted
      << ")\n"
      << "  radius          = " << c.radius_used << "\n"
      << "  margin          = " << c.margin << "  (raw " << c.margin_raw << ")\n"
      << "  boundary mass   = " << c.boundary_mass
      << (c.boundary_ok ? "" : "  [exceeds 1e-3]") << "\n"
      << "  tail bound (K=" << c.K << ") = " << c.tail_bound << "\n"
      << "  verdict         = " << (c.certified ? "certified" : "NOT certified")
      << "\n";
}

}  // namespace

CertifyMode certify_mode(EngineMode m) {
  switch (m) {
    case EngineMode::em: return CertifyMode::em;
    case EngineMode::electrostatic: return CertifyMode::electrostatic;
    case EngineMode::magnetostatic: return CertifyMode::magnetostatic;
  }
  return CertifyMode::em;
}

PreparedRun prepare_run(const RunConfig& cfg, const PotentialSolver& solver) {
  PreparedRun run;
  run.sources = make_source_pair(cfg.sources, cfg.grid, solver);
  run.D_C = solver.coulomb_field(run.sources.rho);
  run.H_A = solver.ampere_field(run.sources.j);
  run.norm_D = proxy_norm(run.D_C, cfg.alpha);
  run.norm_H = proxy_norm(run.H_A, cfg.alpha);
  run.certificate =
      certify(cfg.beta, run.norm_D.total, run.norm_H.total, cfg.order,
              certify_mode(cfg.mode), cfg.safety, run.sources.boundary_mass);
  return run;
}

int cmd_coeffs(int n, bool exact, std::ostream& out) {
  if (n < 0 || n > kCoeffCap) {
    out << "coeffs: n must lie in [0, " << kCoeffCap << "]\n";
    return kExitConfig;
  }
  const RationalSeq seq = invert_series(xi_series_of_g(2 * n + 1), 2 * n + 1);
  for (int k = 0; k <= n; ++k) {
    out << "R_" << k << " = ";
    if (exact)
      out << rational_to_string(seq.R[k]);
    else
      out << std::setprecision(12) << seq.R[k].get_d();
    out << "\n";
  }
  out << "S_1.." << "S_" << (n + 1) << " =";
  for (int k = 0; k <= n; ++k) out << " " << seq.S[k].get_str();
  out << "\n";
  return kExitOk;
}

int cmd_radius(std::ostream& out) {
  const CriticalPointReport rep = critical_points();
  out << "order-12 polynomial coefficients (ascending):";
  for (long long c : rep.ptilde_coeffs) out << " " << c;
  out << "\n";
  out << std::setprecision(12);
  out << "roots (12, with residuals):\n";
  for (std::size_t i = 0; i < rep.roots.size(); ++i)
    out << "  " << rep.roots[i].real() << (rep.roots[i].imag() < 0 ? " - " : " + ")
        << std::abs(rep.roots[i].imag()) << "i   |P~| = " << rep.residuals[i]
        << "\n";
  out << "genuine zeros of dxi/dg (6):\n";
  for (std::size_t i = 0; i < rep.genuine_zeros.size(); ++i)
    out << "  " << rep.genuine_zeros[i].real()
        << (rep.genuine_zeros[i].imag() < 0 ? " - " : " + ")
        << std::abs(rep.genuine_zeros[i].imag())
        << "i   |xi| = " << rep.xi_values[i] << "\n";
  out << "radius (em)            = " << rep.radius << "\n";
  out << "radius (electro/magneto) = " << electrostatic_radius() << "\n";
  const RationalSeq seq = invert_series(xi_series_of_g(61), 61);
  const QRatioReport q = q_ratio(seq);
  out << "q = 1/radius^2         = " << q.q << "   (4q = " << q.four_q << ")\n";
  out << "last ratio R_" << (q.last_index + 1) << "/R_" << q.last_index << " = "
      << q.last_ratio << "   gap to q = " << q.gap << "\n";
  out << "real interval endpoint g = " << rep.g_bullet << "\n";
  return kExitOk;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
  const PotentialSolver solver(cfg.grid, cfg.method);
  const PreparedRun run = prepare_run(cfg, solver);
  print_certificate(run.certificate, out);

  std::filesystem::create_directories(cfg.out_dir);
  json j = {{"schema_version", 1}, {"certificate", certificate_json(run.certificate)}};
  std::ofstream f(cfg.out_dir + "/certificate.json");
  f << j.dump(2) << "\n";
  return run.certificate.certified ? kExitOk : kExitUncertified;
}

int cmd_solve(const RunConfig& cfg, bool force, std::ostream& out) {
  const PotentialSolver solver(cfg.grid, cfg.method);
  PreparedRun run = prepare_run(cfg, solver);
  print_certificate(run.certificate, out);
  if (!run.certificate.certified && !force) {
    out << "refusing to run at an uncertified beta (use --force to override)\n";
    return kExitUncertified;
  }

  const XYMethod xy =
      cfg.order > 8 ? XYMethod::series_algebra : XYMethod::combinatorial;
  SeriesEngine engine(solver, cfg.mode, run.D_C, run.H_A, xy);
  std::vector<double> step_ms;
  for (int k = 1; k <= cfg.order; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    engine.step();
    const auto t1 = std::chrono::steady_clock::now();
    step_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
  }

  auto [D, H] = assemble(engine.state(), cfg.beta);
  VectorField3 E(cfg.grid), B(cfg.grid);
  try {
    std::tie(E, B) = reconstruct_EB(D, H, cfg.beta);
  } catch (const FieldStrengthViolation& e) {
    out << "field-strength bound violated: " << e.what() << "\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(8, e.offending_nodes.size()); ++i)
      out << "  node " << e.offending_nodes[i] << "\n";
    return kExitFieldStrength;
  }
  const ResidualReport res = residuals(E, B, D, H, run.sources.rho, run.sources.j);

  const std::vector<double> R = majorant_doubles(std::min(cfg.order, 29));
  const auto chain =
      norm_chain_report(engine.state(), cfg.alpha, cfg.safety, R);

  // The certificate's blocking boundary check covers the source preparation
  // (compact integrands). Series-step projector integrands decay only
  // algebraically, so their ratios are reported as diagnostics instead.
  const double boundary =
      std::max(run.sources.boundary_mass, engine.max_boundary_mass_ratio());

  const std::string dir = cfg.out_dir;
  std::filesystem::create_directories(dir);
  if (cfg.write_vtk_files) {
    write_vtk(run.sources.rho, dir + "/rho.vtk", "rho");
    write_vtk(run.sources.j, dir + "/j.vtk", "j");
    write_vtk(D, dir + "/D.vtk", "D");
    write_vtk(H, dir + "/H.vtk", "H");
    write_vtk(E, dir + "/E.vtk", "E");
    write_vtk(B, dir + "/B.vtk", "B");
  }
  if (cfg.write_raw_files) {
    write_raw(run.sources.rho, dir + "/rho.mbif");
    write_raw(run.sources.j, dir + "/j.mbif");
    write_raw(D, dir + "/D.mbif");
    write_raw(H, dir + "/H.mbif");
    write_raw(E, dir + "/E.mbif");
    write_raw(B, dir + "/B.mbif");
  }

  json chain_json = json::array();
  for (const auto& row : chain)
    chain_json.push_back({{"k", row.k},
                          {"measured", row.measured},
                          {"majorant", row.majorant},
                          {"within", row.within}});
  json report = {
      {"schema_version", 1},
      {"mode", mode_name(cfg.mode)},
      {"beta", cfg.beta},
      {"order", cfg.order},
      {"alpha", cfg.alpha},
      {"rho_total", run.sources.rho_total},
      {"j_div_residual", run.sources.j_div_residual},
      {"certificate", certificate_json(run.certificate)},
      {"residuals",
       {{"div_D_minus_4pi_rho", res.div_D_minus_4pi_rho},
        {"curl_H_minus_4pi_j", res.curl_H_minus_4pi_j},
        {"curl_E", res.curl_E},
        {"div_B", res.div_B}}},
      {"order_norms", chain_json},
      {"boundary_mass_max", boundary},
      {"step_ms", step_ms}};
  std::ofstream f(dir + "/report.json");
  f << report.dump(2) << "\n";

  out << std::setprecision(6);
  out << "residuals (interior max): div D - 4 pi rho = " << res.div_D_minus_4pi_rho
      << ", curl H - 4 pi j = " << res.curl_H_minus_4pi_j
      << ", curl E = " << res.curl_E << ", div B = " << res.div_B << "\n";
  for (const auto& row : chain)
    out << "order " << row.k << ": ||D^k||+||H^k|| = " << row.measured
        << "  majorant = " << row.majorant
        << (row.within ? "  (within)" : "  (EXCEEDS)") << "\n";
  out << "wrote fields and report.json to " << dir << "\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const PotentialSolver solver(cfg.grid, cfg.method);
  const SourcePair src = make_source_pair(cfg.sources, cfg.grid, solver);
  const std::string dir = cfg.out_dir;
  const VectorField3 D = read_raw_vector(dir + "/D.mbif");
  const VectorField3 H = read_raw_vector(dir + "/H.mbif");
  const VectorField3 E = read_raw_vector(dir + "/E.mbif");
  const VectorField3 B = read_raw_vector(dir + "/B.mbif");
  require_same_grid(D.grid, cfg.grid);
  const ResidualReport res = residuals(E, B, D, H, src.rho, src.j);
  out << std::setprecision(6);
  out << "residuals (interior max):\n"
      << "  div D - 4 pi rho = " << res.div_D_minus_4pi_rho << "\n"
      << "  curl H - 4 pi j  = " << res.curl_H_minus_4pi_j << "\n"
      << "  curl E           = " << res.curl_E << "\n"
      << "  div B            = " << res.div_B << "\n";
  json report = {{"schema_version", 1},
                 {"residuals",
                  {{"div_D_minus_4pi_rho", res.div_D_minus_4pi_rho},
                   {"curl_H_minus_4pi_j", res.curl_H_minus_4pi_j},
                   {"curl_E", res.curl_E},
                   {"div_B", res.div_B}}}};
  std::ofstream f(dir + "/verify.json");
  f << report.dump(2) << "\n";
  return kExitOk;
}

}  // namespace mbi

// mbi -- stationary nonlinear-electrodynamics series solver and certifier
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "mbi/cli.hpp"

namespace {

void apply_thread_setting(int threads) {
#ifdef _OPENMP
  if (threads <= 0) {
    if (const char* env = std::getenv("MBI_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

mbi::RunConfig load_config(const std::string& path, double beta_override,
                           int order_override, const std::string& mode_override,
                           const std::string& out_override) {
  mbi::RunConfig cfg = mbi::RunConfig::load_file(path);
  if (beta_override >= 0.0) cfg.beta = beta_override;
  if (order_override >= 0) cfg.order = order_override;
  if (!mode_override.empty()) cfg.mode = mbi::mode_from_name(mode_override);
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mbi: perturbative series solver for the stationary "
               "Maxwell-Born-Infeld field equations with regular sources"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (default: cores)");

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "print the majorant coefficients R_k and S_k");
  int coeff_n = 29;
  bool exact = false;
  coeffs->add_option("n", coeff_n, "highest index to print");
  coeffs->add_flag("--exact", exact, "print exact fractions instead of decimals");

  // radius
  auto* radius = app.add_subcommand("radius", "print the convergence-radius report");

  // shared config options
  std::string config_path, mode_override, out_override;
  double beta_override = -1.0;
  int order_override = -1;
  bool force = false;

  auto add_config_opts = [&](CLI::App* sub, bool with_force) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--beta", beta_override, "override beta");
    sub->add_option("--order", order_override, "override truncation order K");
    sub->add_option("--mode", mode_override, "override mode (em|electrostatic|magnetostatic)");
    sub->add_option("--out", out_override, "override output directory");
    if (with_force)
      sub->add_flag("--force", force, "run even when the certificate fails");
  };

  auto* certify = app.add_subcommand("certify", "evaluate the convergence certificate");
  add_config_opts(certify, false);
  auto* solve = app.add_subcommand("solve", "run the series solver and write fields");
  add_config_opts(solve, true);
  auto* verify = app.add_subcommand("verify", "recompute residuals from written fields");
  add_config_opts(verify, false);

  CLI11_PARSE(app, argc, argv);
  apply_thread_setting(threads);

  try {
    if (coeffs->parsed()) return mbi::cmd_coeffs(coeff_n, exact, std::cout);
    if (radius->parsed()) return mbi::cmd_radius(std::cout);
    const mbi::RunConfig cfg = load_config(config_path, beta_override,
                                           order_override, mode_override,
                                           out_override);
    if (certify->parsed()) return mbi::cmd_certify(cfg, std::cout);
    if (solve->parsed()) return mbi::cmd_solve(cfg, force, std::cout);
    if (verify->parsed()) return mbi::cmd_verify(cfg, std::cout);
  } catch (const mbi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return mbi::kExitConfig;
  } catch (const mbi::FieldStrengthViolation& e) {
    std::cerr << "field-strength bound: " << e.what() << "\n";
    return mbi::kExitFieldStrength;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mbi::kExitNumerical;
  }
  return mbi::kExitOk;
}

#pragma once

// Run configuration and the hqsolve subcommands.
//
// A run configuration is a flat JSON object; every key is optional and
// unknown keys are rejected:
//
//   k, l                      integers, (2, 0) or (1, 0)
//   R_chart, N_rho, N_theta   grid
//   psi_family                "constant" | "power_theta" | "exp_theta" | "manufactured"
//   psi_p, psi_h0, psi_h2     psi = h(r) * {1, |theta|^p, e^{p|theta|/u}}, h = h0 + h2 r^2
//   manufactured_a, manufactured_b
//                             u* = a + b sqrt(1 + |y|^2), psi tabulated from u*
//   phi_kind                  "constant" | "ambient_affine" (not with "manufactured")
//   phi_c                     constant boundary value
//   phi_a, phi_b              <phi_a, X>_L + phi_b, phi_a a 3-vector
//   newton_tol, max_newton, homotopy_steps, fd_jacobian_eps
//   seed, barriers, verify, refinement_study, write_csv, write_report
//   gradient_sweep_max, output_dir

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "hq/solver.hpp"

namespace hq {

struct RunConfig {
  int k = 2;
  int l = 0;
  double r_chart = 1.0;
  int n_rho = 16;
  int n_theta = 32;
  std::string psi_family = "constant";
  double psi_p = 2.0;
  double psi_h0 = 0.25;
  double psi_h2 = 0.0;
  double manufactured_a = 2.0;
  double manufactured_b = 0.1;
  std::string phi_kind = "constant";
  double phi_c = 2.0;
  std::array<double, 3> phi_a{0.0, 0.0, 0.0};
  double phi_b = 2.0;
  double newton_tol = 1e-10;
  int max_newton = 50;
  int homotopy_steps = 10;
  double fd_jacobian_eps = 1e-9;
  std::uint64_t seed = 7;
  bool barriers = true;
  bool verify = true;
  bool refinement_study = false;
  bool write_csv = true;
  bool write_report = true;
  double gradient_sweep_max = 128.0;
  std::string output_dir = "out";

  bool manufactured() const noexcept { return psi_family == "manufactured"; }
};

/// Schema-validates a parsed document. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

/// Effective configuration with every default spelled out; parses back to
/// the same RunConfig.
nlohmann::json to_json(const RunConfig& cfg);

/// Solver configuration for a grid resolution (the configured one by
/// default). Builds the tabulated psi for the manufactured family. Throws
/// ConfigError on data that cannot be solved (non-positive psi or phi).
SolveConfig make_solve_config(const RunConfig& cfg, std::optional<GridSpec> grid = {});

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNonconvergence = 2, kExitCheckFailed = 3 };

int cmd_solve(const std::string& config_path, const std::optional<std::string>& out_dir,
              std::ostream& out, std::ostream& err);

/// Algebraic suites plus the umbilic and manufactured instances. The report
/// is a deterministic function of the seed.
int cmd_selftest(std::uint64_t seed, const std::optional<std::string>& report_path,
                 std::ostream& out, std::ostream& err);

/// Selftest report as a string; the same bytes cmd_selftest writes.
std::string selftest_report(std::uint64_t seed, bool* passed = nullptr,
                            std::ostream* table = nullptr);

int cmd_suites(int n, int k, int l, long long samples, std::uint64_t seed, std::ostream& out,
               std::ostream& err);

}  // namespace hq

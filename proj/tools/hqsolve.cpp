#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "hq/cli.hpp"

namespace {

// HQ_THREADS=<n> caps the worker threads used by residual and Jacobian
// assembly.
void apply_thread_env() {
  const char* env = std::getenv("HQ_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "hqsolve: ignoring invalid HQ_THREADS='" << env << "'\n";
    return;
  }
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"Solver and checks for Hessian quotient equations on spacelike radial graphs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* solve = app.add_subcommand("solve", "Solve the Dirichlet problem described by a config file");
  solve->add_option("--config", config_path, "Run configuration (JSON)")->required();
  solve->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  std::uint64_t seed = 7;
  std::string report_path;
  auto* selftest = app.add_subcommand("selftest", "Run the algebraic suites and reference instances");
  selftest->add_option("--seed", seed, "Random seed");
  selftest->add_option("--report", report_path, "Write the JSON report to this path");

  int n = 3;
  int k = 2;
  int l = 0;
  long long samples = 10000;
  auto* suites = app.add_subcommand("suites", "Run the randomized algebraic suites for one (n, k, l)");
  suites->add_option("--n", n, "Dimension")->required();
  suites->add_option("--k", k, "Numerator order")->required();
  suites->add_option("--l", l, "Denominator order")->required();
  suites->add_option("--samples", samples, "Samples per suite")->required();
  suites->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hq::kExitConfig;
  }

  if (*solve) {
    return hq::cmd_solve(config_path, out_dir.empty() ? std::nullopt : std::optional(out_dir),
                         std::cout, std::cerr);
  }
  if (*selftest) {
    return hq::cmd_selftest(seed, report_path.empty() ? std::nullopt : std::optional(report_path),
                            std::cout, std::cerr);
  }
  return hq::cmd_suites(n, k, l, samples, seed, std::cout, std::cerr);
}

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "hq/errors.hpp"
#include "hq/verify.hpp"

using namespace hq;

namespace {

SolveConfig umbilic_config() {
  SolveConfig cfg;
  cfg.grid = GridSpec{1.0, 16, 32};
  cfg.psi = PsiSpec::constant(0.25);
  cfg.phi = BoundaryData::constant_value(2.0);
  return cfg;
}

NodalField constant_field(const Grid& grid, double c) {
  NodalField f;
  f.values.assign(static_cast<std::size_t>(grid.node_count()), c);
  return f;
}

// Raw-number recomputation of every flag in an estimate report.
void check_self_consistent(const EstimateReport& e) {
  const GradientMaxPrinciple& g = e.gradient_mp;
  CHECK(std::isfinite(g.interior_max));
  CHECK(std::isfinite(g.boundary_max));
  CHECK(std::isfinite(g.boundary_bound));
  CHECK(g.bound_holds == (g.sup_w <= g.boundary_bound));
  CHECK(g.holds == (g.attained_on_boundary && g.bound_holds));
  if (g.boundary_max > g.interior_max) CHECK(g.attained_on_boundary);
  CHECK(std::isfinite(e.curvature_ratio.ratio));
  CHECK(e.curvature_ratio.ratio ==
        doctest::Approx(e.curvature_ratio.sup_interior_a / (1.0 + e.curvature_ratio.sup_boundary_a)));
  if (e.barrier_gaps) {
    const BarrierGaps& b = *e.barrier_gaps;
    CHECK(b.lower_holds == (b.lower_gap >= -kBarrierSlack));
    CHECK(b.upper_holds == (b.upper_gap >= -kBarrierSlack));
    CHECK(b.holds == (b.lower_holds && b.upper_holds));
  }
  CHECK(std::isfinite(e.ellipticity_min));
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("geodesic diameter") {
  const Grid grid(GridSpec{1.0, 8, 16});
  CHECK(geodesic_diameter(grid) == doctest::Approx(2.0 * std::log(1.0 + std::sqrt(2.0))));
}

TEST_CASE("umbilic estimates") {
  const SolveConfig cfg = umbilic_config();
  const Grid grid(cfg.grid);
  const auto geo = graph_fields(constant_field(grid, 2.0), grid);

  const GradientMaxPrinciple g = gradient_mp_check(geo, grid, 1.0);
  CHECK(g.sup_w == 1.0);
  CHECK(g.attained_on_boundary);
  CHECK(g.bound_holds);
  CHECK(g.holds);
  CHECK(g.boundary_bound > g.sup_w);
  CHECK(gradient_mp_sweep(geo, grid).s_used == 1.0);

  const CurvatureRatio cr = curvature_ratio(geo, grid);
  const double a = std::sqrt(2.0) / 2.0;
  CHECK(std::abs(cr.sup_interior_a - a) <= 1e-10);
  CHECK(std::abs(cr.sup_boundary_a - a) <= 1e-10);
  CHECK(std::abs(cr.ratio - a / (1.0 + a)) <= 1e-10);

  // d sigma_2 / d lambda_i = sigma_1(lambda | i) = 1/2.
  CHECK(std::abs(ellipticity_min(geo, 2, 0) - 0.5) <= 1e-10);
}

TEST_CASE("gradient maximum principle on a tilted field") {
  const Grid grid(GridSpec{1.0, 16, 32});
  NodalField u = constant_field(grid, 2.0);
  // Interior bump of the gradient: W peaks inside, boundary dominates for large S.
  for (int i = 0; i < grid.node_count(); ++i) {
    const Vector& y = grid.chart(i).y;
    u[i] = 2.0 + 0.3 * y.squaredNorm() + 0.05 * std::sin(6.0 * y(0));
  }
  const auto geo = graph_fields(u, grid);
  const GradientMaxPrinciple s1 = gradient_mp_check(geo, grid, 1.0);
  const GradientMaxPrinciple sweep = gradient_mp_sweep(geo, grid, 128.0);
  CHECK(sweep.attained_on_boundary);
  CHECK(sweep.s_used >= s1.s_used);
  CHECK(sweep.bound_holds);
  CHECK(sweep.boundary_max >= sweep.interior_max * (1 - 1e-12));
}

TEST_CASE("barrier_check") {
  const Grid grid(GridSpec{1.0, 8, 16});
  BarrierPair bp;
  bp.lower.u = constant_field(grid, 1.0);
  bp.upper.u = constant_field(grid, 3.0);
  BarrierGaps b = barrier_check(constant_field(grid, 2.0), bp);
  CHECK(b.lower_gap == 1.0);
  CHECK(b.upper_gap == 1.0);
  CHECK(b.holds);

  bp.upper.u[5] = 2.0 - 5e-9;
  b = barrier_check(constant_field(grid, 2.0), bp);
  CHECK(b.upper_gap == doctest::Approx(-5e-9));
  CHECK(b.upper_holds);

  bp.lower.u[7] = 2.0 + 2e-8;
  b = barrier_check(constant_field(grid, 2.0), bp);
  CHECK_FALSE(b.lower_holds);
  CHECK_FALSE(b.holds);

  NodalField shortf;
  shortf.values.assign(2, 1.0);
  CHECK_THROWS_AS(barrier_check(shortf, bp), DomainError);
}

TEST_CASE("estimate on the umbilic instance with barriers") {
  const SolveConfig cfg = umbilic_config();
  const Grid grid(cfg.grid);
  const SolveReport sol = homotopy_solve(cfg);
  REQUIRE(sol.converged);
  const BarrierPair bp = barrier_pair(grid, cfg);
  const EstimateReport e = estimate(sol, grid, cfg, &bp);
  check_self_consistent(e);
  REQUIRE(e.barrier_gaps);
  CHECK(std::abs(e.barrier_gaps->lower_gap) <= 1e-10);
  CHECK(std::abs(e.barrier_gaps->upper_gap) <= 1e-10);
  CHECK(e.gradient_mp.holds);
  REQUIRE(e.structural);
  CHECK_FALSE(e.structural->condition_holds);
}

TEST_CASE("estimate on a power_theta instance") {
  SolveConfig cfg = umbilic_config();
  cfg.psi = PsiSpec::power_theta(2.0, RadialProfile{0.1, 0.02});
  const Grid grid(cfg.grid);
  const SolveReport sol = homotopy_solve(cfg);
  REQUIRE(sol.converged);
  const EstimateReport e = estimate(sol, grid, cfg);
  check_self_consistent(e);
  CHECK_FALSE(e.barrier_gaps);
  REQUIRE(e.structural);
  CHECK(e.structural->condition_holds);
  CHECK(e.structural->convexity_holds);
  CHECK(e.ellipticity_min > 0.0);
  CHECK(e.gradient_mp.holds);
}

TEST_CASE("algebraic suites pass at the default seed") {
  const SuitesReport r = algebraic_suites(7);
  CHECK(r.passed);
  CHECK(r.suites.size() == 6u);
  for (const SuiteResult& s : r.suites) {
    INFO(s.name);
    CHECK(s.passed);
    CHECK(s.violations == 0);
    CHECK(s.samples > 0);
  }
  CHECK(std::isfinite(r.b0.value));
  CHECK(std::abs(r.b0.value - r.b0_alt_seed.value) <= 0.1 * std::max(r.b0.value, r.b0_alt_seed.value));
}

TEST_CASE("algebraic suites are deterministic in the seed") {
  const SuiteSizes small{500, 50, 2000};
  const SuitesReport a = algebraic_suites(11, small);
  const SuitesReport b = algebraic_suites(11, small);
  REQUIRE(a.suites.size() == b.suites.size());
  for (std::size_t i = 0; i < a.suites.size(); ++i) {
    CHECK(a.suites[i].worst_margin == b.suites[i].worst_margin);
  }
  CHECK(a.b0.value == b.b0.value);
}

TEST_CASE("restricted suites for one triple") {
  const SuitesReport r = algebraic_suites(7, 2, 2, 0, 2000);
  CHECK(r.passed);
  const auto ell = std::find_if(r.suites.begin(), r.suites.end(),
                                [](const SuiteResult& s) { return s.name == "ellipticity"; });
  REQUIRE(ell != r.suites.end());
  CHECK(ell->worst_margin > 0.0);
  const SuitesReport wide = algebraic_suites(7, 4, 3, 1, 1000);
  CHECK(wide.suites.size() == 5u);
  for (const SuiteResult& s : wide.suites) {
    if (s.name != "b0_seed_stability") CHECK(s.passed);
  }
  CHECK_THROWS_AS(algebraic_suites(7, 2, 3, 0, 10), ConfigError);
  CHECK_THROWS_AS(algebraic_suites(7, 3, 2, 2, 10), ConfigError);
}

}

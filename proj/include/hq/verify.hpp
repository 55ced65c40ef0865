#pragma once

// Post-solve estimate checks and randomized algebraic property suites.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hq/discretize.hpp"
#include "hq/psispec.hpp"
#include "hq/solver.hpp"

namespace hq {

/// Slack granted to the barrier ordering and to "holds" flags.
inline constexpr double kBarrierSlack = 1e-8;

/// Maximum principle for W e^{S pi}, W = 1/v, pi = ln u, so that
/// W e^{S pi} = u^S / v.
struct GradientMaxPrinciple {
  double s_used = 0.0;
  double interior_max = 0.0;      ///< max of u^S / v over the unknowns
  double boundary_max = 0.0;      ///< same over the boundary ring
  double sup_w = 0.0;             ///< sup of W over all nodes
  double boundary_sup_w = 0.0;    ///< sup of W over the boundary ring
  double boundary_bound = 0.0;    ///< boundary_sup_w e^{S (2 sup|phi| + diam)}
  bool attained_on_boundary = false;
  bool bound_holds = false;
  bool holds = false;             ///< attained_on_boundary && bound_holds
};

struct CurvatureRatio {
  double sup_interior_a = 0.0;
  double sup_boundary_a = 0.0;
  double ratio = 0.0;  ///< sup_interior_a / (1 + sup_boundary_a)
};

struct BarrierGaps {
  double lower_gap = 0.0;  ///< min (u - s-)
  double upper_gap = 0.0;  ///< min (s+ - u)
  bool lower_holds = false;
  bool upper_holds = false;
  bool holds = false;
};

struct EstimateReport {
  GradientMaxPrinciple gradient_mp;
  CurvatureRatio curvature_ratio;
  std::optional<BarrierGaps> barrier_gaps;
  std::optional<StructuralReport> structural;
  double ellipticity_min = 0.0;
};

/// Geodesic diameter of the chart ball, 2 asinh(R).
double geodesic_diameter(const Grid& grid);

GradientMaxPrinciple gradient_mp_check(std::span<const NodeGeometry> geometry,
                                       const Grid& grid, double s);

/// Tries S = 1, 2, 4, ..., up to s_max and keeps the first S whose maximum
/// is attained on the boundary ring (the last one tried otherwise).
GradientMaxPrinciple gradient_mp_sweep(std::span<const NodeGeometry> geometry,
                                       const Grid& grid, double s_max = 128.0);

CurvatureRatio curvature_ratio(std::span<const NodeGeometry> geometry, const Grid& grid);

BarrierGaps barrier_check(const NodalField& u, const BarrierPair& barriers);

/// min over nodes and i of d(sigma_k/sigma_l)/d lambda_i on the solution.
double ellipticity_min(std::span<const NodeGeometry> geometry, int k, int l);

/// (y, u, theta) at every unknown node, for structural checks of psi.
std::vector<PsiSample> structural_samples(std::span<const NodeGeometry> geometry,
                                          const Grid& grid);

/// All post-solve estimates. Structural margins are skipped for tabulated psi.
EstimateReport estimate(const SolveReport& solution, const Grid& grid, const SolveConfig& cfg,
                        const BarrierPair* barriers = nullptr, double s_max = 128.0);

struct SuiteResult {
  std::string name;
  long long samples = 0;
  long long violations = 0;
  double worst_margin = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct SuiteSizes {
  long long samples = 10000;
  long long oracle_tuples = 1000;  ///< per (n, k) in the enumeration check
  long long b0_samples = 100000;
};

struct SuitesReport {
  std::vector<SuiteResult> suites;
  B0Estimate b0;
  B0Estimate b0_alt_seed;
  bool passed = false;
};

/// Randomized algebraic suites: enumeration oracle for sigma_k, ellipticity
/// of the quotient, Newton-Maclaurin margins, midpoint concavity, the
/// lower bound for the gradient-dependent matrix quotient, and the B0
/// estimate with a seed-stability check. Deterministic in `seed`.
SuitesReport algebraic_suites(std::uint64_t seed, const SuiteSizes& sizes = {});

/// Restricted variant for one (n, k, l): ellipticity, and Newton-Maclaurin
/// and concavity where the indices allow.
SuitesReport algebraic_suites(std::uint64_t seed, int n, int k, int l, long long samples);

}  // namespace hq

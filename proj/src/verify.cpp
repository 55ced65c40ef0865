#include "hq/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "hq/errors.hpp"
#include "hq/symfun.hpp"

namespace hq {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Triple {
  int n, k, l;
};

// Independent of the recurrence used by the library: sum of products over
// all k-subsets.
double sigma_by_subsets(std::span<const double> lam, int k) {
  const int n = static_cast<int>(lam.size());
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) prod *= lam[static_cast<std::size_t>(i)];
    }
    sum += prod;
  }
  return sum;
}

std::mt19937_64 suite_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

SuiteResult finish(SuiteResult r) {
  r.passed = r.violations == 0 && r.worst_margin >= r.threshold;
  return r;
}

SuiteResult sigma_oracle_suite(std::uint64_t seed, long long tuples) {
  SuiteResult r{"sigma_enumeration", 0, 0, kInf, -1e-12, false};
  auto rng = suite_rng(seed, 1);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int n = 1; n <= 6; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (long long s = 0; s < tuples; ++s) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v) x = dist(rng);
        const EigenTuple lam(v);
        const double got = elementary_symmetric(lam, k);
        const double want = sigma_by_subsets(v, k);
        // Scale by the sum of absolute subset products to tolerate cancellation.
        std::vector<double> absv(v.size());
        std::transform(v.begin(), v.end(), absv.begin(), [](double x) { return std::abs(x); });
        const double scale = std::max(sigma_by_subsets(absv, k), 1e-300);
        const double err = std::abs(got - want) / scale;
        r.worst_margin = std::min(r.worst_margin, -err);
        if (-err < r.threshold) ++r.violations;
        ++r.samples;
      }
    }
  }
  return finish(r);
}

SuiteResult ellipticity_suite(std::uint64_t seed, std::span<const Triple> triples,
                              long long samples) {
  SuiteResult r{"ellipticity", 0, 0, kInf, 0.0, false};
  std::uint64_t stream = 10;
  for (const Triple& t : triples) {
    auto rng = suite_rng(seed, stream++);
    for (long long s = 0; s < samples; ++s) {
      const EigenTuple lam = sample_gamma_cone(rng, t.n, t.k);
      for (double g : quotient_gradient(lam, t.k, t.l)) {
        r.worst_margin = std::min(r.worst_margin, g);
        if (!(g > 0.0)) ++r.violations;
      }
      ++r.samples;
    }
  }
  r = finish(r);
  r.passed = r.violations == 0;
  return r;
}

SuiteResult maclaurin_suite(std::uint64_t seed, std::span<const Triple> triples,
                            long long samples) {
  SuiteResult r{"newton_maclaurin", 0, 0, kInf, -1e-10, false};
  std::uint64_t stream = 20;
  for (const Triple& t : triples) {
    auto rng = suite_rng(seed, stream++);
    for (long long s = 0; s < samples; ++s) {
      const EigenTuple lam = sample_gamma_cone(rng, t.n, t.k);
      const double m = newton_maclaurin_margin(lam, t.k, t.l);
      r.worst_margin = std::min(r.worst_margin, m);
      if (m < r.threshold) ++r.violations;
      ++r.samples;
    }
  }
  return finish(r);
}

SuiteResult concavity_suite(std::uint64_t seed, std::span<const Triple> triples,
                            long long samples) {
  SuiteResult r{"midpoint_concavity", 0, 0, kInf, -1e-10, false};
  std::uint64_t stream = 30;
  for (const Triple& t : triples) {
    auto rng = suite_rng(seed, stream++);
    for (long long s = 0; s < samples; ++s) {
      const EigenTuple a = sample_gamma_cone(rng, t.n, t.k);
      const EigenTuple b = sample_gamma_cone(rng, t.n, t.k);
      const double m = concavity_probe(a, b, t.k, t.l);
      r.worst_margin = std::min(r.worst_margin, m);
      if (m < r.threshold) ++r.violations;
      ++r.samples;
    }
  }
  return finish(r);
}

// value / ((1 - rho^2) p^{-2(k-l)} F_k/F_l(q)) - 1 over random p, Dp with
// |Dp|/p <= 0.9 and q = B B^T.
SuiteResult matrix_bound_suite(std::uint64_t seed, std::span<const Triple> triples,
                               long long samples) {
  SuiteResult r{"gradient_matrix_bound", 0, 0, kInf, -1e-10, false};
  std::uint64_t stream = 40;
  for (const Triple& t : triples) {
    auto rng = suite_rng(seed, stream++);
    std::uniform_real_distribution<double> p_dist(0.5, 2.0);
    std::uniform_real_distribution<double> rho_dist(0.0, 0.9);
    std::normal_distribution<double> normal;
    for (long long s = 0; s < samples; ++s) {
      const double p = p_dist(rng);
      Eigen::VectorXd dir(t.n);
      for (int i = 0; i < t.n; ++i) dir(i) = normal(rng);
      const double rho_target = rho_dist(rng);
      const Eigen::VectorXd dp = dir.normalized() * (rho_target * p);
      Eigen::MatrixXd b(t.n, t.n);
      for (int i = 0; i < t.n; ++i) {
        for (int j = 0; j < t.n; ++j) b(i, j) = normal(rng);
      }
      const Eigen::MatrixXd q = b * b.transpose();
      const double rho = dp.norm() / p;
      const double bound = (1.0 - rho * rho) * std::pow(p, -2.0 * (t.k - t.l)) *
                           matrix_sigma_quotient(q, t.k, t.l);
      const double value = matrix_quotient(p, dp, q, t.k, t.l);
      const double m = value / bound - 1.0;
      r.worst_margin = std::min(r.worst_margin, m);
      if (!(m >= r.threshold)) ++r.violations;
      ++r.samples;
    }
  }
  return finish(r);
}

SuiteResult b0_stability(const B0Estimate& a, const B0Estimate& b) {
  SuiteResult r{"b0_seed_stability", a.accepted + b.accepted, 0, 0.0, 0.0, false};
  const double top = std::max(a.value, b.value);
  const double spread = top > 0.0 ? std::abs(a.value - b.value) / top : 0.0;
  r.worst_margin = 0.1 - spread;
  if (!std::isfinite(a.value) || !std::isfinite(b.value)) r.violations = 1;
  return finish(r);
}

}  // namespace

double geodesic_diameter(const Grid& grid) { return 2.0 * std::asinh(grid.spec().r_chart); }

GradientMaxPrinciple gradient_mp_check(std::span<const NodeGeometry> geometry,
                                       const Grid& grid, double s) {
  if (geometry.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("gradient_mp_check: geometry does not match the grid");
  }
  GradientMaxPrinciple out;
  out.s_used = s;
  double log_int = -kInf;
  double log_bdy = -kInf;
  double sup_phi = 0.0;
  for (int node = 0; node < grid.node_count(); ++node) {
    const NodeGeometry& g = geometry[static_cast<std::size_t>(node)];
    const double w = 1.0 / g.shape.v;
    const double log_q = s * std::log(g.u) + std::log(w);
    out.sup_w = std::max(out.sup_w, w);
    if (grid.is_boundary(node)) {
      log_bdy = std::max(log_bdy, log_q);
      out.boundary_sup_w = std::max(out.boundary_sup_w, w);
      sup_phi = std::max(sup_phi, std::abs(g.u));
    } else {
      log_int = std::max(log_int, log_q);
    }
  }
  out.interior_max = std::exp(log_int);
  out.boundary_max = std::exp(log_bdy);
  out.attained_on_boundary = log_bdy >= log_int - kTieTolerance;
  out.boundary_bound =
      out.boundary_sup_w * std::exp(s * (2.0 * sup_phi + geodesic_diameter(grid)));
  out.bound_holds = std::isfinite(out.sup_w) && out.sup_w <= out.boundary_bound;
  out.holds = out.attained_on_boundary && out.bound_holds;
  return out;
}

GradientMaxPrinciple gradient_mp_sweep(std::span<const NodeGeometry> geometry,
                                       const Grid& grid, double s_max) {
  GradientMaxPrinciple last;
  for (double s = 1.0; s <= s_max; s *= 2.0) {
    last = gradient_mp_check(geometry, grid, s);
    if (last.attained_on_boundary) return last;
  }
  return last;
}

CurvatureRatio curvature_ratio(std::span<const NodeGeometry> geometry, const Grid& grid) {
  if (geometry.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("curvature_ratio: geometry does not match the grid");
  }
  CurvatureRatio out;
  for (int node = 0; node < grid.node_count(); ++node) {
    const auto lam = geometry[static_cast<std::size_t>(node)].shape.lambda.values();
    double sq = 0.0;
    for (double x : lam) sq += x * x;
    const double norm = std::sqrt(sq);
    if (grid.is_boundary(node)) {
      out.sup_boundary_a = std::max(out.sup_boundary_a, norm);
    } else {
      out.sup_interior_a = std::max(out.sup_interior_a, norm);
    }
  }
  out.ratio = out.sup_interior_a / (1.0 + out.sup_boundary_a);
  return out;
}

BarrierGaps barrier_check(const NodalField& u, const BarrierPair& barriers) {
  if (barriers.lower.u.size() != u.size() || barriers.upper.u.size() != u.size()) {
    throw DomainError("barrier_check: field sizes differ");
  }
  BarrierGaps out;
  out.lower_gap = kInf;
  out.upper_gap = kInf;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.lower_gap = std::min(out.lower_gap, u.values[i] - barriers.lower.u.values[i]);
    out.upper_gap = std::min(out.upper_gap, barriers.upper.u.values[i] - u.values[i]);
  }
  out.lower_holds = out.lower_gap >= -kBarrierSlack;
  out.upper_holds = out.upper_gap >= -kBarrierSlack;
  out.holds = out.lower_holds && out.upper_holds;
  return out;
}

double ellipticity_min(std::span<const NodeGeometry> geometry, int k, int l) {
  double out = kInf;
  for (const NodeGeometry& g : geometry) {
    for (double c : quotient_gradient(g.shape.lambda, k, l)) out = std::min(out, c);
  }
  return out;
}

std::vector<PsiSample> structural_samples(std::span<const NodeGeometry> geometry,
                                          const Grid& grid) {
  std::vector<PsiSample> out;
  out.reserve(static_cast<std::size_t>(grid.unknown_count()));
  for (int node = 0; node < grid.unknown_count(); ++node) {
    const NodeGeometry& g = geometry[static_cast<std::size_t>(node)];
    out.push_back(PsiSample{grid.chart(node).y, g.u, g.shape.theta});
  }
  return out;
}

EstimateReport estimate(const SolveReport& solution, const Grid& grid, const SolveConfig& cfg,
                        const BarrierPair* barriers, double s_max) {
  const std::vector<NodeGeometry> geometry = graph_fields(solution.u, grid);
  EstimateReport out;
  out.gradient_mp = gradient_mp_sweep(geometry, grid, s_max);
  out.curvature_ratio = curvature_ratio(geometry, grid);
  out.ellipticity_min = ellipticity_min(geometry, cfg.k, cfg.l);
  if (barriers) out.barrier_gaps = barrier_check(solution.u, *barriers);
  if (cfg.psi.family != PsiFamily::tabulated) {
    PsiSpec spec = cfg.psi;
    spec.k = cfg.k;
    spec.l = cfg.l;
    const auto samples = structural_samples(geometry, grid);
    out.structural = check_structural_conditions(spec, samples);
  }
  return out;
}

SuitesReport algebraic_suites(std::uint64_t seed, const SuiteSizes& sizes) {
  static constexpr Triple kEllipticity[] = {{2, 2, 0}, {3, 2, 0}, {3, 3, 1}, {4, 3, 0}};
  static constexpr Triple kMaclaurin[] = {{2, 2, 1}, {3, 2, 1}, {3, 3, 1}, {4, 3, 2}, {5, 4, 2}};
  static constexpr Triple kConcavity[] = {{2, 2, 0}, {3, 2, 0}, {4, 2, 0}, {5, 2, 0}, {3, 3, 1}};
  static constexpr Triple kMatrix[] = {{2, 2, 0}, {3, 2, 0}, {3, 3, 1}, {4, 3, 0}};

  SuitesReport out;
  out.suites.push_back(sigma_oracle_suite(seed, sizes.oracle_tuples));
  out.suites.push_back(ellipticity_suite(seed, kEllipticity, sizes.samples));
  out.suites.push_back(maclaurin_suite(seed, kMaclaurin, sizes.samples));
  out.suites.push_back(concavity_suite(seed, kConcavity, sizes.samples));
  out.suites.push_back(matrix_bound_suite(seed, kMatrix, sizes.samples));
  out.b0 = estimate_b0(sizes.b0_samples, 3, 2, 0, seed);
  out.b0_alt_seed = estimate_b0(sizes.b0_samples, 3, 2, 0, seed + 1);
  out.suites.push_back(b0_stability(out.b0, out.b0_alt_seed));
  out.passed = std::all_of(out.suites.begin(), out.suites.end(),
                           [](const SuiteResult& s) { return s.passed; });
  return out;
}

SuitesReport algebraic_suites(std::uint64_t seed, int n, int k, int l, long long samples) {
  if (n < 1 || n > kMaxDim || l < 0 || k <= l || k > n) {
    throw ConfigError("suites: need 0 <= l < k <= n <= " + std::to_string(kMaxDim));
  }
  if (samples < 1) throw ConfigError("suites: samples must be >= 1");
  const Triple t[] = {{n, k, l}};
  SuitesReport out;
  out.suites.push_back(ellipticity_suite(seed, t, samples));
  if (l >= 1) out.suites.push_back(maclaurin_suite(seed, t, samples));
  out.suites.push_back(concavity_suite(seed, t, samples));
  out.suites.push_back(matrix_bound_suite(seed, t, samples));
  out.b0 = estimate_b0(samples, n, k, l, seed);
  out.b0_alt_seed = estimate_b0(samples, n, k, l, seed + 1);
  out.suites.push_back(b0_stability(out.b0, out.b0_alt_seed));
  out.passed = std::all_of(out.suites.begin(), out.suites.end(),
                           [](const SuiteResult& s) { return s.passed; });
  return out;
}

}  // namespace hq

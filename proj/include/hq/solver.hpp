#pragma once

// Discrete Dirichlet problem F(lambda(A(u))) = f(X, theta) on the polar grid,
// F = (sigma_k / sigma_l)^{1/(k-l)}, f = psi^{1/(k-l)}, solved by damped
// Newton with a stencil-coloured finite-difference Jacobian and a
// continuation path from umbilic data.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "hq/discretize.hpp"
#include "hq/graphgeom.hpp"
#include "hq/psispec.hpp"

namespace hq {

struct SolveConfig {
  int k = 2;
  int l = 0;
  GridSpec grid;
  PsiSpec psi;
  BoundaryData phi;
  double newton_tol = 1e-10;
  int max_newton = 50;
  int homotopy_steps = 10;
  /// Tolerance for intermediate continuation steps; the final step at t = 1
  /// always uses newton_tol.
  double homotopy_tol = 1e-6;
  double backtrack = 0.5;
  double min_step = 0x1p-20;
  double min_homotopy_step = 0x1p-10;
  double fd_jacobian_eps = 1e-9;
};

/// Throws ConfigError unless (k, l) is (2, 0) or (1, 0) and the tolerances
/// are positive.
void validate(const SolveConfig& cfg);

/// Right-hand side of one discrete equation. The prescribed quantity is
///   psi_eff = psi_scale * psi^psi_power,
/// blended along the continuation path as (1 - t) psi_start + t psi_eff,
/// and the equation reads quotient_power(lambda) = blended^{1/(k-l)}.
struct Equation {
  int k = 2;
  int l = 0;
  PsiSpec psi;
  double psi_power = 1.0;
  double psi_scale = 1.0;
  double t = 1.0;
  double psi_start = 0.0;

  double rhs(const ChartPoint& x, double u, double theta) const;
};

/// psi of the umbilic graph u = c: C(n,k)/C(n,l) c^{-(k-l)}.
double umbilic_psi(int n, int k, int l, double c);

/// sigma_k/sigma_l = psi with the configured (k, l).
Equation main_equation(const SolveConfig& cfg);

/// sigma_1 = psi^{1/2} n (n(n-1)/2)^{-1/2}: the quasilinear barrier problem.
Equation lower_barrier_equation(const SolveConfig& cfg);

enum class FaultKind { non_positive, non_spacelike, inadmissible, invalid_psi };

std::string to_string(FaultKind kind);

struct NodeFault {
  int node = 0;
  FaultKind kind = FaultKind::inadmissible;
  double margin = 0.0;
};

/// Residual over the unknown nodes, or the set of offending nodes.
struct ResidualEval {
  std::vector<double> values;
  std::vector<NodeFault> faults;
  double spacelike_margin = 0.0;  ///< min 1 - |Du|/u over unknowns
  double sigma1_min = 0.0;
  double sigma2_min = 0.0;

  bool ok() const noexcept { return faults.empty(); }
  double max_norm() const;
};

ResidualEval residual(const NodalField& u, const Grid& grid, const Equation& eq);
ResidualEval residual(const NodalField& u, const SolveConfig& cfg);

/// Column colouring of the Jacobian for a grid. The pole row couples to the
/// whole first ring and is assembled separately.
class JacobianPattern {
 public:
  explicit JacobianPattern(const Grid& grid);

  struct Entry {
    int row;
    int col;
  };

  int color_count() const noexcept { return static_cast<int>(colors_.size()); }
  std::span<const int> columns(int color) const { return colors_[static_cast<std::size_t>(color)]; }
  std::span<const Entry> entries(int color) const { return entries_[static_cast<std::size_t>(color)]; }
  std::span<const int> pole_columns() const noexcept { return pole_columns_; }
  int unknown_count() const noexcept { return unknowns_; }

 private:
  int unknowns_;
  std::vector<std::vector<int>> colors_;
  std::vector<std::vector<Entry>> entries_;
  std::vector<int> pole_columns_;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Central-difference Jacobian of residual() over the unknowns with
/// step eps_rel * max(1, |u_j|). A step that makes the perturbed state
/// inadmissible is halved up to four times, then AdmissibilityError.
SparseMatrix jacobian(const NodalField& u, const Grid& grid, const Equation& eq,
                      const JacobianPattern& pattern, double eps_rel);
SparseMatrix jacobian(const NodalField& u, const SolveConfig& cfg);

struct IterateRecord {
  double t = 1.0;
  int iteration = 0;
  double residual = 0.0;
  double step_length = 0.0;
  double spacelike_margin = 0.0;
  double sigma1_min = 0.0;
  double sigma2_min = 0.0;
};

struct HomotopyStep {
  double t = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct SolveReport {
  NodalField u;
  bool converged = false;
  std::string status;
  int newton_iterations = 0;
  double residual_norm = 0.0;
  double min_spacelike_margin = 0.0;
  double min_sigma1 = 0.0;
  double min_sigma2 = 0.0;
  double last_good_t = 0.0;
  std::vector<HomotopyStep> path;
  /// Every accepted iterate, including each starting point.
  std::vector<IterateRecord> iterates;
};

/// Damped Newton from u0 (boundary values already applied). Throws
/// AdmissibilityError if u0 itself is not positive, spacelike and
/// admissible at every unknown; iteration failures are reported instead.
SolveReport newton_solve(const NodalField& u0, const Grid& grid, const Equation& eq,
                         const SolveConfig& cfg, double tol);
SolveReport newton_solve(const NodalField& u0, const SolveConfig& cfg);

/// Continuation in t of (psi, phi) from the umbilic data (psi_0, c_0),
/// c_0 the mean boundary value of phi, warm-starting Newton at each step
/// and halving the t-step on failure.
SolveReport homotopy_solve(const Grid& grid, const Equation& eq, const BoundaryData& phi,
                           const SolveConfig& cfg);
SolveReport homotopy_solve(const SolveConfig& cfg);

struct BarrierPair {
  SolveReport upper;  ///< s+: sigma_2 = psi
  SolveReport lower;  ///< s-: sigma_1 = psi^{1/2} n (n(n-1)/2)^{-1/2}
};

/// Requires k = 2, l = 0.
BarrierPair barrier_pair(const Grid& grid, const SolveConfig& cfg);
BarrierPair barrier_pair(const SolveConfig& cfg);

/// Geometry of the discrete graph at one node.
struct NodeGeometry {
  double u = 0.0;
  Vector du;
  Matrix d2u;
  ShapeData shape;
};

/// Per-node geometry for every node (boundary ring included).
std::vector<NodeGeometry> graph_fields(const NodalField& u, const Grid& grid);

/// u*(y) = a + b sqrt(1 + |y|^2), a restriction of an ambient Lorentz-affine
/// function, used for manufactured solutions.
struct ManufacturedSolution {
  double a = 2.0;
  double b = 0.1;

  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  Matrix hessian(const Vector& y) const;
  BoundaryData boundary() const;
  /// Exact shape data from analytic derivatives.
  ShapeData exact_shape(const ChartPoint& x) const;
};

NodalField sample_field(const Grid& grid, const ManufacturedSolution& sol);

/// Tabulated psi = sigma_k/sigma_l(lambda(u*)) at the grid nodes, exact.
PsiSpec manufactured_psi(const Grid& grid, const ManufacturedSolution& sol, int k, int l);

}  // namespace hq

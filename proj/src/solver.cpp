#include "hq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

#include "hq/errors.hpp"
#include "hq/symfun.hpp"

namespace hq {

namespace {

constexpr int kDim = 2;

double root(double value, int m) {
  if (m == 1) return value;
  if (m == 2) return std::sqrt(value);
  return std::pow(value, 1.0 / m);
}

struct RowOutcome {
  double value = 0.0;
  double margin = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  std::optional<FaultKind> fault;
  double fault_margin = 0.0;
};

RowOutcome evaluate_row(std::span<const double> u, const Grid& grid, const Equation& eq,
                        int node) {
  RowOutcome out;
  const double u0 = u[static_cast<std::size_t>(node)];
  if (!(u0 > 0.0)) {
    out.fault = FaultKind::non_positive;
    out.fault_margin = u0;
    return out;
  }
  const ChartPoint& x = grid.chart(node);
  NodePartials np = node_partials(u, grid, node);
  Matrix d2u = covariant_hessian(np.grad, np.hess, x);
  const GraphPointState state(u0, std::move(np.grad), std::move(d2u), x);
  out.margin = spacelike_margin(state);
  if (!(out.margin > 0.0)) {
    out.fault = FaultKind::non_spacelike;
    out.fault_margin = out.margin;
    return out;
  }
  ShapeData sh;
  try {
    sh = shape(state);
  } catch (const DomainError&) {
    out.fault = FaultKind::non_spacelike;
    out.fault_margin = out.margin;
    return out;
  }
  const auto lam = sh.lambda.values();
  out.sigma1 = sigma_ext(lam, 1);
  out.sigma2 = sigma_ext(lam, 2);
  for (int j = 1; j <= eq.k; ++j) {
    if (!(sigma_ext(lam, j) > 0.0)) {
      out.fault = FaultKind::inadmissible;
      out.fault_margin = cone_margin(sh.lambda, eq.k);
      return out;
    }
  }
  const double lhs = quotient_power(sh.lambda, eq.k, eq.l);
  try {
    out.value = lhs - eq.rhs(x, u0, sh.theta);
  } catch (const InvalidPsiError&) {
    out.fault = FaultKind::invalid_psi;
    return out;
  }
  return out;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double matrix_inf_norm(const SparseMatrix& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) rows(it.row()) += std::abs(it.value());
  }
  return inf_norm(rows);
}

std::string describe_faults(const ResidualEval& eval) {
  const NodeFault& f = eval.faults.front();
  return std::to_string(eval.faults.size()) + " offending node(s), first node " +
         std::to_string(f.node) + " (" + to_string(f.kind) + ", margin " +
         std::to_string(f.margin) + ")";
}

void record_iterate(SolveReport& rep, const ResidualEval& eval, double t, int iteration,
                    double step) {
  rep.iterates.push_back(IterateRecord{t, iteration, eval.max_norm(), step,
                                       eval.spacelike_margin, eval.sigma1_min,
                                       eval.sigma2_min});
}

void finish_report(SolveReport& rep, const ResidualEval& eval) {
  rep.residual_norm = eval.max_norm();
  rep.min_spacelike_margin = eval.spacelike_margin;
  rep.min_sigma1 = eval.sigma1_min;
  rep.min_sigma2 = eval.sigma2_min;
}

// Damped Newton on one equation. Returns whether tol was reached; the
// iterate in `u` is always the last accepted one.
bool newton_core(NodalField& u, const Grid& grid, const Equation& eq, const SolveConfig& cfg,
                 const JacobianPattern& pattern, double tol, SolveReport& rep,
                 int& iterations) {
  ResidualEval eval = residual(u, grid, eq);
  if (!eval.ok()) {
    const bool spacelike_fault = eval.faults.front().kind == FaultKind::non_spacelike;
    const std::string msg = "newton_solve: starting state rejected: " + describe_faults(eval);
    if (spacelike_fault) throw NonSpacelikeError(msg, eval.faults.front().margin);
    throw AdmissibilityError(msg);
  }
  iterations = 0;
  record_iterate(rep, eval, eq.t, 0, 0.0);
  const int unknowns = grid.unknown_count();

  for (;;) {
    const double norm = eval.max_norm();
    finish_report(rep, eval);
    if (norm <= tol) {
      rep.status = "converged";
      return true;
    }
    if (iterations >= cfg.max_newton) {
      rep.status = "max_newton exceeded";
      return false;
    }

    SparseMatrix jac;
    try {
      jac = jacobian(u, grid, eq, pattern, cfg.fd_jacobian_eps);
    } catch (const DomainError& e) {
      rep.status = std::string("jacobian failed: ") + e.what();
      return false;
    }
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success) {
      rep.status = "linear solve failed: singular Jacobian";
      return false;
    }
    const Eigen::VectorXd rhs =
        -Eigen::Map<const Eigen::VectorXd>(eval.values.data(), unknowns);
    Eigen::VectorXd delta = lu.solve(rhs);
    const double jnorm = matrix_inf_norm(jac);
    auto backward_ok = [&](const Eigen::VectorXd& d) {
      const double res = inf_norm(jac * d - rhs);
      return res <= 1e-12 * (jnorm * inf_norm(d) + inf_norm(rhs));
    };
    if (!backward_ok(delta)) delta += lu.solve(Eigen::VectorXd(rhs - jac * delta));
    if (!backward_ok(delta) || !delta.allFinite()) {
      rep.status = "linear solve failed: residual check";
      return false;
    }

    bool accepted = false;
    NodalField trial = u;
    for (double s = 1.0; s >= cfg.min_step; s *= cfg.backtrack) {
      for (int i = 0; i < unknowns; ++i) trial[i] = u[i] + s * delta(i);
      ResidualEval te = residual(trial, grid, eq);
      if (te.ok() && te.max_norm() < norm) {
        u = trial;
        eval = std::move(te);
        ++iterations;
        ++rep.newton_iterations;
        record_iterate(rep, eval, eq.t, iterations, s);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.status = "line search exhausted";
      return false;
    }
  }
}

bool is_umbilic_data(const Equation& eq, const BoundaryData& phi, double psi_start) {
  if (phi.kind != BoundaryData::Kind::constant) return false;
  if (eq.psi.family != PsiFamily::constant || eq.psi.h.h2 != 0.0) return false;
  const double value = eq.psi.h.h0;
  const double eff =
      eq.psi_scale * (eq.psi_power == 1.0 ? value : std::pow(value, eq.psi_power));
  return std::abs(eff - psi_start) <= 1e-15 * psi_start;
}

}  // namespace

void validate(const SolveConfig& cfg) {
  const bool supported = (cfg.k == 2 && cfg.l == 0) || (cfg.k == 1 && cfg.l == 0);
  if (!supported) {
    throw ConfigError("solver: supported (k, l) pairs are (2, 0) and (1, 0)");
  }
  if (!(cfg.newton_tol > 0.0) || !(cfg.homotopy_tol > 0.0) || !(cfg.fd_jacobian_eps > 0.0) ||
      !(cfg.min_step > 0.0) || !(cfg.min_homotopy_step > 0.0)) {
    throw ConfigError("solver: tolerances must be positive");
  }
  if (!(cfg.backtrack > 0.0 && cfg.backtrack < 1.0)) {
    throw ConfigError("solver: backtrack factor must lie in (0, 1)");
  }
  if (cfg.max_newton < 1 || cfg.homotopy_steps < 1) {
    throw ConfigError("solver: max_newton and homotopy_steps must be >= 1");
  }
}

double Equation::rhs(const ChartPoint& x, double u, double theta) const {
  const int m = k - l;
  if (t == 1.0 && psi_power == 1.0 && psi_scale == 1.0 && psi.k == k && psi.l == l) {
    return eval_psi_root(psi, x, u, theta);
  }
  const double value = eval_psi(psi, x, u, theta);
  double eff = psi_power == 1.0 ? value
               : psi_power == 0.5 ? std::sqrt(value)
                                  : std::pow(value, psi_power);
  eff *= psi_scale;
  const double blended = t == 1.0 ? eff : (1.0 - t) * psi_start + t * eff;
  return root(blended, m);
}

double umbilic_psi(int n, int k, int l, double c) {
  return binomial(n, k) / binomial(n, l) * std::pow(c, -(k - l));
}

Equation main_equation(const SolveConfig& cfg) {
  Equation eq;
  eq.k = cfg.k;
  eq.l = cfg.l;
  eq.psi = cfg.psi;
  eq.psi.k = cfg.k;
  eq.psi.l = cfg.l;
  return eq;
}

Equation lower_barrier_equation(const SolveConfig& cfg) {
  Equation eq;
  eq.k = 1;
  eq.l = 0;
  eq.psi = cfg.psi;
  eq.psi_power = 0.5;
  eq.psi_scale = kDim / std::sqrt(binomial(kDim, 2));
  return eq;
}

std::string to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::non_positive:
      return "non-positive";
    case FaultKind::non_spacelike:
      return "non-spacelike";
    case FaultKind::inadmissible:
      return "inadmissible";
    case FaultKind::invalid_psi:
      return "invalid psi";
  }
  return "unknown";
}

double ResidualEval::max_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

ResidualEval residual(const NodalField& u, const Grid& grid, const Equation& eq) {
  if (u.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("residual: field length does not match the grid");
  }
  const int unknowns = grid.unknown_count();
  std::vector<RowOutcome> rows(static_cast<std::size_t>(unknowns));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < unknowns; ++r) {
    rows[static_cast<std::size_t>(r)] = evaluate_row(u.values, grid, eq, r);
  }

  ResidualEval out;
  out.values.resize(static_cast<std::size_t>(unknowns));
  out.spacelike_margin = std::numeric_limits<double>::infinity();
  out.sigma1_min = std::numeric_limits<double>::infinity();
  out.sigma2_min = std::numeric_limits<double>::infinity();
  for (int r = 0; r < unknowns; ++r) {
    const RowOutcome& row = rows[static_cast<std::size_t>(r)];
    if (row.fault) {
      out.faults.push_back(NodeFault{r, *row.fault, row.fault_margin});
      continue;
    }
    out.values[static_cast<std::size_t>(r)] = row.value;
    out.spacelike_margin = std::min(out.spacelike_margin, row.margin);
    out.sigma1_min = std::min(out.sigma1_min, row.sigma1);
    out.sigma2_min = std::min(out.sigma2_min, row.sigma2);
  }
  if (!out.ok()) out.values.clear();
  return out;
}

ResidualEval residual(const NodalField& u, const SolveConfig& cfg) {
  return residual(u, Grid(cfg.grid), main_equation(cfg));
}

JacobianPattern::JacobianPattern(const Grid& grid) : unknowns_(grid.unknown_count()) {
  const auto count = static_cast<std::size_t>(unknowns_);
  std::vector<std::vector<int>> dependents(count);
  for (int r = 1; r < unknowns_; ++r) {
    for (int c : grid.stencil(r)) {
      if (c < unknowns_) dependents[static_cast<std::size_t>(c)].push_back(r);
    }
  }
  for (int c : grid.stencil(0)) {
    if (c < unknowns_) pole_columns_.push_back(c);
  }

  // Greedy distance-2 colouring: columns sharing a (non-pole) row differ.
  std::vector<int> color(count, -1);
  std::vector<int> stamp;
  for (int c = 0; c < unknowns_; ++c) {
    for (int r : dependents[static_cast<std::size_t>(c)]) {
      for (int c2 : grid.stencil(r)) {
        if (c2 >= unknowns_) continue;
        const int k = color[static_cast<std::size_t>(c2)];
        if (k >= 0) stamp[static_cast<std::size_t>(k)] = c;
      }
    }
    int pick = 0;
    while (pick < static_cast<int>(stamp.size()) && stamp[static_cast<std::size_t>(pick)] == c) {
      ++pick;
    }
    if (pick == static_cast<int>(stamp.size())) stamp.push_back(-1);
    color[static_cast<std::size_t>(c)] = pick;
  }

  colors_.resize(stamp.size());
  entries_.resize(stamp.size());
  for (int c = 0; c < unknowns_; ++c) {
    const auto k = static_cast<std::size_t>(color[static_cast<std::size_t>(c)]);
    colors_[k].push_back(c);
    for (int r : dependents[static_cast<std::size_t>(c)]) entries_[k].push_back(Entry{r, c});
  }
}

SparseMatrix jacobian(const NodalField& u, const Grid& grid, const Equation& eq,
                      const JacobianPattern& pattern, double eps_rel) {
  const int unknowns = grid.unknown_count();
  if (pattern.unknown_count() != unknowns) throw DomainError("jacobian: pattern/grid mismatch");
  if (u.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("jacobian: field length does not match the grid");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> up = u.values;
  std::vector<double> um = u.values;
  constexpr int kMaxHalvings = 4;

  auto step_for = [&](int c, double scale) {
    return scale * eps_rel * std::max(1.0, std::abs(u[c]));
  };

  for (int color = 0; color < pattern.color_count(); ++color) {
    const auto cols = pattern.columns(color);
    const auto entries = pattern.entries(color);
    std::vector<double> plus(entries.size());
    std::vector<double> minus(entries.size());
    double scale = 1.0;
    for (int attempt = 0;; ++attempt) {
      for (int c : cols) {
        const double e = step_for(c, scale);
        up[static_cast<std::size_t>(c)] = u[c] + e;
        um[static_cast<std::size_t>(c)] = u[c] - e;
      }
      int faults = 0;
#pragma omp parallel for schedule(static) reduction(+ : faults)
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const RowOutcome a = evaluate_row(up, grid, eq, entries[i].row);
        const RowOutcome b = evaluate_row(um, grid, eq, entries[i].row);
        if (a.fault || b.fault) ++faults;
        plus[i] = a.value;
        minus[i] = b.value;
      }
      if (faults == 0) break;
      if (attempt == kMaxHalvings) {
        throw AdmissibilityError("jacobian: perturbed state inadmissible after halving");
      }
      scale *= 0.5;
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto c = static_cast<std::size_t>(entries[i].col);
      triplets.emplace_back(entries[i].row, entries[i].col, (plus[i] - minus[i]) / (up[c] - um[c]));
    }
    for (int c : cols) {
      up[static_cast<std::size_t>(c)] = u[c];
      um[static_cast<std::size_t>(c)] = u[c];
    }
  }

  for (int c : pattern.pole_columns()) {
    double scale = 1.0;
    for (int attempt = 0;; ++attempt) {
      const double e = step_for(c, scale);
      up[static_cast<std::size_t>(c)] = u[c] + e;
      um[static_cast<std::size_t>(c)] = u[c] - e;
      const RowOutcome a = evaluate_row(up, grid, eq, 0);
      const RowOutcome b = evaluate_row(um, grid, eq, 0);
      if (!a.fault && !b.fault) {
        triplets.emplace_back(0, c, (a.value - b.value) /
                                        (up[static_cast<std::size_t>(c)] -
                                         um[static_cast<std::size_t>(c)]));
        break;
      }
      if (attempt == kMaxHalvings) {
        throw AdmissibilityError("jacobian: perturbed pole state inadmissible after halving");
      }
      scale *= 0.5;
    }
    up[static_cast<std::size_t>(c)] = u[c];
    um[static_cast<std::size_t>(c)] = u[c];
  }

  SparseMatrix jac(unknowns, unknowns);
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

SparseMatrix jacobian(const NodalField& u, const SolveConfig& cfg) {
  const Grid grid(cfg.grid);
  return jacobian(u, grid, main_equation(cfg), JacobianPattern(grid), cfg.fd_jacobian_eps);
}

SolveReport newton_solve(const NodalField& u0, const Grid& grid, const Equation& eq,
                         const SolveConfig& cfg, double tol) {
  validate(cfg);
  if (u0.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("newton_solve: field length does not match the grid");
  }
  SolveReport rep;
  rep.u = u0;
  const JacobianPattern pattern(grid);
  int iterations = 0;
  rep.converged = newton_core(rep.u, grid, eq, cfg, pattern, tol, rep, iterations);
  rep.last_good_t = rep.converged ? eq.t : 0.0;
  rep.path.push_back(HomotopyStep{eq.t, iterations, rep.residual_norm, rep.converged});
  return rep;
}

SolveReport newton_solve(const NodalField& u0, const SolveConfig& cfg) {
  const Grid grid(cfg.grid);
  return newton_solve(u0, grid, main_equation(cfg), cfg, cfg.newton_tol);
}

SolveReport homotopy_solve(const Grid& grid, const Equation& eq, const BoundaryData& phi,
                           const SolveConfig& cfg) {
  validate(cfg);
  const double c0 = mean_boundary_value(phi, grid);
  if (!(c0 > 0.0)) throw InvalidBoundaryError("homotopy_solve: mean boundary value must be positive");
  const double psi_start = umbilic_psi(kDim, eq.k, eq.l, c0);
  const JacobianPattern pattern(grid);

  SolveReport rep;
  rep.u.values.assign(static_cast<std::size_t>(grid.node_count()), c0);
  rep.last_good_t = 0.0;

  auto boundary_at = [&](NodalField field, double t) {
    for (int node = grid.unknown_count(); node < grid.node_count(); ++node) {
      field[node] = (1.0 - t) * c0 + t * phi.value_at(grid.chart(node).y);
    }
    return field;
  };

  double t = 0.0;
  double dt = is_umbilic_data(eq, phi, psi_start) ? 1.0 : 1.0 / cfg.homotopy_steps;
  // Previous accepted point on the path, for the secant predictor.
  double t_prev = 0.0;
  NodalField u_prev;
  while (t < 1.0) {
    double t_next = t + dt;
    if (t_next > 1.0 - 1e-12) t_next = 1.0;
    Equation step_eq = eq;
    step_eq.t = t_next;
    step_eq.psi_start = psi_start;
    const double tol = t_next == 1.0 ? cfg.newton_tol : std::max(cfg.newton_tol, cfg.homotopy_tol);

    std::vector<NodalField> starts;
    if (!u_prev.values.empty()) {
      NodalField predicted = rep.u;
      const double w = (t_next - t) / (t - t_prev);
      for (int i = 0; i < grid.unknown_count(); ++i) predicted[i] += w * (rep.u[i] - u_prev[i]);
      starts.push_back(boundary_at(std::move(predicted), t_next));
    }
    starts.push_back(boundary_at(rep.u, t_next));

    bool ok = false;
    SolveReport attempt;
    NodalField candidate;
    int iterations = 0;
    for (NodalField& start : starts) {
      attempt = SolveReport{};
      candidate = std::move(start);
      int used = 0;
      try {
        ok = newton_core(candidate, grid, step_eq, cfg, pattern, tol, attempt, used);
      } catch (const DomainError& e) {
        attempt.status = e.what();
      }
      iterations += used;
      rep.newton_iterations += attempt.newton_iterations;
      if (ok) break;
    }
    rep.path.push_back(HomotopyStep{t_next, iterations, attempt.residual_norm, ok});
    if (ok) {
      rep.iterates.insert(rep.iterates.end(), attempt.iterates.begin(), attempt.iterates.end());
      u_prev = std::move(rep.u);
      t_prev = t;
      rep.u = std::move(candidate);
      rep.residual_norm = attempt.residual_norm;
      rep.min_spacelike_margin = attempt.min_spacelike_margin;
      rep.min_sigma1 = attempt.min_sigma1;
      rep.min_sigma2 = attempt.min_sigma2;
      t = t_next;
      rep.last_good_t = t;
      continue;
    }
    dt *= 0.5;
    if (dt < cfg.min_homotopy_step) {
      rep.converged = false;
      rep.status = "homotopy step underflow at t=" + std::to_string(rep.last_good_t) +
                   " (" + attempt.status + ")";
      return rep;
    }
  }
  rep.converged = true;
  rep.status = "converged";
  return rep;
}

SolveReport homotopy_solve(const SolveConfig& cfg) {
  const Grid grid(cfg.grid);
  return homotopy_solve(grid, main_equation(cfg), cfg.phi, cfg);
}

BarrierPair barrier_pair(const Grid& grid, const SolveConfig& cfg) {
  if (cfg.k != 2 || cfg.l != 0) {
    throw ConfigError("barrier_pair: barriers are available for k = 2, l = 0 only");
  }
  SolveConfig lower_cfg = cfg;
  lower_cfg.k = 1;
  return BarrierPair{homotopy_solve(grid, main_equation(cfg), cfg.phi, cfg),
                     homotopy_solve(grid, lower_barrier_equation(cfg), cfg.phi, lower_cfg)};
}

BarrierPair barrier_pair(const SolveConfig& cfg) { return barrier_pair(Grid(cfg.grid), cfg); }

std::vector<NodeGeometry> graph_fields(const NodalField& u, const Grid& grid) {
  if (u.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("graph_fields: field length does not match the grid");
  }
  std::vector<NodeGeometry> out(static_cast<std::size_t>(grid.node_count()));
  for (int node = 0; node < grid.node_count(); ++node) {
    const ChartPoint& x = grid.chart(node);
    NodePartials np = node_partials(u.values, grid, node);
    NodeGeometry& g = out[static_cast<std::size_t>(node)];
    g.u = u[node];
    g.du = np.grad;
    g.d2u = covariant_hessian(np.grad, np.hess, x);
    g.shape = shape(GraphPointState(g.u, g.du, g.d2u, x));
  }
  return out;
}

double ManufacturedSolution::value(const Vector& y) const {
  return a + b * std::sqrt(1.0 + y.squaredNorm());
}

Vector ManufacturedSolution::gradient(const Vector& y) const {
  return b * y / std::sqrt(1.0 + y.squaredNorm());
}

Matrix ManufacturedSolution::hessian(const Vector& y) const {
  const double w = std::sqrt(1.0 + y.squaredNorm());
  const auto n = y.size();
  return b * (Matrix::Identity(n, n) / w - y * y.transpose() / (w * w * w));
}

BoundaryData ManufacturedSolution::boundary() const {
  // <(0, 0, -b), (y, W)>_L = b W
  return BoundaryData::ambient_affine({0.0, 0.0, -b}, a);
}

ShapeData ManufacturedSolution::exact_shape(const ChartPoint& x) const {
  const Vector grad = gradient(x.y);
  return shape(GraphPointState(value(x.y), grad, covariant_hessian(grad, hessian(x.y), x), x));
}

NodalField sample_field(const Grid& grid, const ManufacturedSolution& sol) {
  NodalField f;
  f.values.resize(static_cast<std::size_t>(grid.node_count()));
  for (int node = 0; node < grid.node_count(); ++node) f[node] = sol.value(grid.chart(node).y);
  return f;
}

PsiSpec manufactured_psi(const Grid& grid, const ManufacturedSolution& sol, int k, int l) {
  std::vector<double> table(static_cast<std::size_t>(grid.node_count()));
  for (int node = 0; node < grid.node_count(); ++node) {
    const ShapeData sh = sol.exact_shape(grid.chart(node));
    if (!in_gamma_cone(sh.lambda, k)) {
      throw AdmissibilityError("manufactured_psi: u* is not admissible on the grid");
    }
    table[static_cast<std::size_t>(node)] = hessian_quotient(sh.lambda, k, l);
  }
  auto field = std::make_shared<const TabulatedField>(grid.spec().r_chart, grid.n_rho(),
                                                      grid.n_theta(), std::move(table));
  return PsiSpec::tabulated(std::move(field), k, l);
}

}  // namespace hq

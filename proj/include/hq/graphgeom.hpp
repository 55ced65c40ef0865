#pragma once

// Pointwise geometry of the spacelike radial graph {u(x) x : x in M}.

#include "hq/hypgeom.hpp"
#include "hq/symfun.hpp"

namespace hq {

/// u, its covariant gradient (lower index) and covariant Hessian at a chart
/// point. The state does not own the point.
struct GraphPointState {
  GraphPointState(double u_, Vector du_, Matrix d2u_, const ChartPoint& point_)
      : u(u_), du(std::move(du_)), d2u(std::move(d2u_)), point(&point_) {}

  double u;
  Vector du;
  Matrix d2u;
  const ChartPoint* point;
};

struct InducedMetric {
  Matrix g;
  Matrix g_inv;
};

struct ShapeData {
  double v = 1.0;
  Matrix g;
  Matrix g_inv;
  Matrix h;
  EigenTuple lambda;  ///< descending
  double theta = 0.0;
};

/// sigma^{ij} u_i u_j.
double gradient_norm_sq(const GraphPointState& state);

/// 1 - |Du|_sigma / u; positive iff the state is spacelike.
double spacelike_margin(const GraphPointState& state);

/// sqrt(1 - |Du|^2 / u^2). Throws NonSpacelikeError when |Du| >= u.
double spacelike_v(const GraphPointState& state);

/// g_ij = u^2 sigma_ij - u_i u_j and
/// g^{ij} = (sigma^{ij} + u^i u^j / (u^2 v^2)) / u^2.
InducedMetric induced_metric(const GraphPointState& state);

/// h_ij = (u_ij + u sigma_ij - 2 u_i u_j / u) / v.
Matrix second_fundamental_form(const GraphPointState& state);

/// Eigenvalues of g^{-1} h by Cholesky reduction L^{-1} h L^{-T}, g = L L^T,
/// sorted descending. Throws GeometryError if g is not positive definite.
EigenTuple principal_curvatures(const Matrix& g, const Matrix& h);

/// theta = -u / v (always <= -u).
double support_theta(const GraphPointState& state);

/// All of the above in one pass.
ShapeData shape(const GraphPointState& state);

}  // namespace hq

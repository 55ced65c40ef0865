#include "hq/graphgeom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "hq/errors.hpp"

namespace hq {

namespace {

void require_positive(const GraphPointState& s) {
  if (!(s.u > 0.0)) throw DomainError("graphgeom: u must be positive");
}

double checked_v(const GraphPointState& s) {
  require_positive(s);
  const double ratio = gradient_norm_sq(s) / (s.u * s.u);
  if (!(ratio < 1.0)) {
    throw NonSpacelikeError("graphgeom: |Du| >= u (not spacelike)", spacelike_margin(s));
  }
  return std::sqrt(1.0 - ratio);
}

InducedMetric metric_with_v(const GraphPointState& s, double v) {
  const Matrix& sigma = s.point->sigma;
  const Matrix& sigma_inv = s.point->sigma_inv;
  const Vector up = sigma_inv * s.du;
  const double u2 = s.u * s.u;
  InducedMetric m;
  m.g = u2 * sigma - s.du * s.du.transpose();
  m.g_inv = (sigma_inv + up * up.transpose() / (u2 * v * v)) / u2;
  return m;
}

Matrix sff_with_v(const GraphPointState& s, double v) {
  return (s.d2u + s.u * s.point->sigma - (2.0 / s.u) * s.du * s.du.transpose()) / v;
}

}  // namespace

double gradient_norm_sq(const GraphPointState& state) {
  return state.du.dot(state.point->sigma_inv * state.du);
}

double spacelike_margin(const GraphPointState& state) {
  return 1.0 - std::sqrt(std::max(0.0, gradient_norm_sq(state))) / state.u;
}

double spacelike_v(const GraphPointState& state) { return checked_v(state); }

InducedMetric induced_metric(const GraphPointState& state) {
  return metric_with_v(state, checked_v(state));
}

Matrix second_fundamental_form(const GraphPointState& state) {
  return sff_with_v(state, checked_v(state));
}

EigenTuple principal_curvatures(const Matrix& g, const Matrix& h) {
  const auto n = g.rows();
  if (g.cols() != n || h.rows() != n || h.cols() != n) {
    throw GeometryError("principal_curvatures: shape mismatch");
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  if (n == 2) {
    // Closed form for the reduced 2x2 symmetric matrix.
    const double l00 = std::sqrt(g(0, 0));
    if (!(g(0, 0) > 0.0)) throw GeometryError("principal_curvatures: g not positive definite");
    const double l10 = g(1, 0) / l00;
    const double d = g(1, 1) - l10 * l10;
    if (!(d > 0.0)) throw GeometryError("principal_curvatures: g not positive definite");
    const double l11 = std::sqrt(d);
    // M = L^{-1} H L^{-T}
    const double a = h(0, 0) / (l00 * l00);
    const double b = (h(1, 0) - l10 * a * l00) / (l00 * l11);
    const double c = (h(1, 1) - 2.0 * l10 * (h(1, 0) / l00) + l10 * l10 * a) / (l11 * l11);
    const double mean = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    ev[0] = mean + rad;
    ev[1] = mean - rad;
  } else {
    const Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) {
      throw GeometryError("principal_curvatures: g not positive definite");
    }
    Matrix m = llt.matrixL().solve(h);
    m = llt.matrixL().solve(m.transpose()).eval();
    m = (0.5 * (m + m.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), std::greater<>());
  }
  return EigenTuple(std::move(ev));
}

double support_theta(const GraphPointState& state) { return -state.u / checked_v(state); }

ShapeData shape(const GraphPointState& state) {
  ShapeData out;
  out.v = checked_v(state);
  InducedMetric m = metric_with_v(state, out.v);
  out.g = std::move(m.g);
  out.g_inv = std::move(m.g_inv);
  out.h = sff_with_v(state, out.v);
  out.lambda = principal_curvatures(out.g, out.h);
  out.theta = -state.u / out.v;
  return out;
}

}  // namespace hq

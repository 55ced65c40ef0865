#include "hq/hypgeom.hpp"

#include <cmath>

#include "hq/errors.hpp"

namespace hq {

namespace {

void require_dim(const Vector& y) {
  if (y.size() < 1 || y.size() > kMaxDim) {
    throw DomainError("hypgeom: dimension must be in [1, 8]");
  }
}

}  // namespace

double lorentz_inner(const AmbientVector& a, const AmbientVector& b) {
  const auto n = a.size() - 1;
  return a.head(n).dot(b.head(n)) - a(n) * b(n);
}

AmbientVector embed(const Vector& y) {
  require_dim(y);
  const auto n = y.size();
  AmbientVector x(n + 1);
  x.head(n) = y;
  x(n) = std::sqrt(1.0 + y.squaredNorm());
  return x;
}

ChartMetric chart_metric(const Vector& y) {
  require_dim(y);
  const auto n = y.size();
  const double w2 = 1.0 + y.squaredNorm();
  ChartMetric m;
  m.sigma = Matrix::Identity(n, n) - y * y.transpose() / w2;
  m.sigma_inv = Matrix::Identity(n, n) + y * y.transpose();
  return m;
}

Christoffel christoffels(const Vector& y) {
  require_dim(y);
  const int n = static_cast<int>(y.size());
  const Matrix sigma = chart_metric(y).sigma;
  Christoffel gamma(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gamma(k, i, j) = -sigma(i, j) * y(k);
  return gamma;
}

double geodesic_radius(const Vector& y) { return std::asinh(y.norm()); }

ChartPoint make_chart_point(const Vector& y) {
  ChartMetric m = chart_metric(y);
  return ChartPoint{y, std::move(m.sigma), std::move(m.sigma_inv), christoffels(y)};
}

Matrix covariant_hessian(const Vector& partials1, const Matrix& partials2,
                         const ChartPoint& point) {
  const int n = point.dim();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double corr = 0.0;
      for (int k = 0; k < n; ++k) corr += point.christoffel(k, i, j) * partials1(k);
      out(i, j) = partials2(i, j) - corr;
    }
  }
  return out;
}

}  // namespace hq

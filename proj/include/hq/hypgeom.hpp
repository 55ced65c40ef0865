#pragma once

// The hyperbolic space H^n(1) = {<x,x>_L = -1, x_{n+1} > 0} in the single
// global chart y -> (y, sqrt(1 + |y|^2)).

#include <vector>

#include <Eigen/Dense>

namespace hq {

inline constexpr int kMaxDim = 8;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                             kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using AmbientVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim + 1, 1>;

/// Christoffel symbols Gamma^k_{ij}, stored densely.
class Christoffel {
 public:
  Christoffel() = default;
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int dim() const noexcept { return n_; }
  double operator()(int k, int i, int j) const { return data_[offset(k, i, j)]; }
  double& operator()(int k, int i, int j) { return data_[offset(k, i, j)]; }

 private:
  std::size_t offset(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n_ + i) * n_ + j);
  }
  int n_ = 0;
  std::vector<double> data_;
};

struct ChartMetric {
  Matrix sigma;      ///< sigma_ij
  Matrix sigma_inv;  ///< sigma^{ij}
};

/// Chart coordinates with the metric data evaluated there.
struct ChartPoint {
  Vector y;
  Matrix sigma;
  Matrix sigma_inv;
  Christoffel christoffel;

  int dim() const noexcept { return static_cast<int>(y.size()); }
};

double lorentz_inner(const AmbientVector& a, const AmbientVector& b);

/// (y, sqrt(1 + |y|^2)).
AmbientVector embed(const Vector& y);

/// sigma_ij = delta_ij - y_i y_j / (1 + |y|^2),  sigma^{ij} = delta_ij + y_i y_j.
ChartMetric chart_metric(const Vector& y);

/// Levi-Civita connection of the chart metric: Gamma^k_{ij} = -sigma_ij y_k.
Christoffel christoffels(const Vector& y);

/// Hyperbolic distance to the pole, arcsinh |y|.
double geodesic_radius(const Vector& y);

ChartPoint make_chart_point(const Vector& y);

/// u_ij = d_i d_j u - Gamma^k_{ij} d_k u.
Matrix covariant_hessian(const Vector& partials1, const Matrix& partials2,
                         const ChartPoint& point);

}  // namespace hq

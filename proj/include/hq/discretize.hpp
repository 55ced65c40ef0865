#pragma once

// Polar finite-difference grid on the geodesic ball |y| <= R_chart (n = 2).
//
// Node 0 is the pole; ring i = 1..N_rho holds N_theta nodes at angles
// 2 pi j / N_theta, flat index 1 + (i-1) N_theta + j. The outermost ring is
// the Dirichlet boundary, so the unknowns are exactly the first
// 1 + (N_rho - 1) N_theta nodes.

#include <array>
#include <span>
#include <vector>

#include "hq/hypgeom.hpp"

namespace hq {

struct GridSpec {
  double r_chart = 1.0;
  int n_rho = 16;
  int n_theta = 32;
};

struct PolarIndex {
  int ring = 0;   ///< 0 = pole
  int angle = 0;  ///< 0 for the pole

  friend bool operator==(const PolarIndex&, const PolarIndex&) = default;
};

class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  const GridSpec& spec() const noexcept { return spec_; }
  int n_rho() const noexcept { return spec_.n_rho; }
  int n_theta() const noexcept { return spec_.n_theta; }
  double step() const noexcept { return step_; }
  double angle_step() const noexcept { return angle_step_; }

  int node_count() const noexcept { return 1 + spec_.n_rho * spec_.n_theta; }
  int unknown_count() const noexcept { return 1 + (spec_.n_rho - 1) * spec_.n_theta; }
  bool is_boundary(int node) const noexcept { return node >= unknown_count(); }

  int index(PolarIndex p) const;
  PolarIndex polar(int node) const;

  const ChartPoint& chart(int node) const { return charts_[static_cast<std::size_t>(node)]; }
  double rho(int node) const { return polar(node).ring * step_; }
  double angle(int node) const { return polar(node).angle * angle_step_; }

  /// Nodes whose values enter the finite-difference partials at `node`.
  std::span<const int> stencil(int node) const;

  double cos_angle(int j) const { return cos_[static_cast<std::size_t>(j)]; }
  double sin_angle(int j) const { return sin_[static_cast<std::size_t>(j)]; }
  /// Denominators of the fitted angular differences: 2 sin(dt), 2 (1 - cos(dt)).
  double first_angle_denominator() const noexcept { return first_denom_; }
  double second_angle_denominator() const noexcept { return second_denom_; }

 private:
  GridSpec spec_;
  double step_;
  double angle_step_;
  double first_denom_;
  double second_denom_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<ChartPoint> charts_;
  std::vector<int> stencil_offsets_;
  std::vector<int> stencil_nodes_;
};

/// Validates the parameters (R > 0, N_rho >= 8, N_theta even >= 16) and
/// builds the grid. Throws ConfigError on invalid input.
Grid build_grid(double r_chart, int n_rho, int n_theta);

/// Nodal values, one per grid node (boundary included).
struct NodalField {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](int node) const { return values[static_cast<std::size_t>(node)]; }
  double& operator[](int node) { return values[static_cast<std::size_t>(node)]; }
};

struct NodePartials {
  Vector grad;  ///< d u / d y_i
  Matrix hess;  ///< d^2 u / d y_i d y_j
};

/// Chart partials at one node. Interior rings use second-order central
/// differences in (rho, angle) mapped through the polar Jacobian; angular
/// differences are trigonometrically fitted so linear functions of y are
/// differentiated exactly. The pole uses the Fourier modes 0..2 of the first
/// ring; the boundary ring uses one-sided second-order rho differences.
NodePartials node_partials(std::span<const double> values, const Grid& grid, int node);

struct Partials {
  std::vector<Vector> grad;
  std::vector<Matrix> hess;
};

/// node_partials at every node.
Partials fd_partials(const NodalField& field, const Grid& grid);

/// Dirichlet data: a constant c, or the restriction of an ambient
/// Lorentz-affine function <a, x>_L + b to the boundary ring.
struct BoundaryData {
  enum class Kind { constant, ambient_affine };

  Kind kind = Kind::constant;
  double c = 1.0;
  std::array<double, 3> a{0.0, 0.0, 0.0};
  double b = 0.0;

  static BoundaryData constant_value(double c);
  static BoundaryData ambient_affine(std::array<double, 3> a, double b);

  double value_at(const Vector& y) const;
};

/// Overwrites the boundary ring. Throws InvalidBoundaryError on a
/// non-positive boundary value.
NodalField apply_boundary(NodalField field, const BoundaryData& phi, const Grid& grid);

/// Mean of phi over the boundary nodes.
double mean_boundary_value(const BoundaryData& phi, const Grid& grid);

}  // namespace hq

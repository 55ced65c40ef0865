#pragma once

// Prescribed right-hand sides psi(x, u, theta).
//
//   constant     psi = h(x)
//   power_theta  psi = |theta|^p h(x)
//   exp_theta    psi = exp(p |theta| / u) h(x)
//   tabulated    psi = nodal table on a polar grid, bilinear in (rho, angle)
//
// h(x) is a radial profile in the geodesic distance r to the pole,
// h(r) = h0 + h2 r^2. theta enters through |theta| so that psi stays
// positive for theta = -u/v < 0.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hq/hypgeom.hpp"

namespace hq {

enum class PsiFamily { constant, power_theta, exp_theta, tabulated };

std::string to_string(PsiFamily family);
PsiFamily psi_family_from_string(const std::string& name);

struct RadialProfile {
  double h0 = 1.0;
  double h2 = 0.0;

  double operator()(double r) const { return h0 + h2 * r * r; }
};

/// Nodal values on the polar grid (pole, then rings 1..N_rho, N_theta angles
/// each), interpolated bilinearly in (rho, angle) of the chart coordinates.
class TabulatedField {
 public:
  TabulatedField(double r_chart, int n_rho, int n_theta, std::vector<double> values);

  double operator()(const Vector& y) const;
  std::span<const double> values() const noexcept { return values_; }
  int n_rho() const noexcept { return n_rho_; }
  int n_theta() const noexcept { return n_theta_; }
  double r_chart() const noexcept { return r_chart_; }

 private:
  double ring_value(int ring, double angle_pos) const;

  double r_chart_;
  int n_rho_;
  int n_theta_;
  std::vector<double> values_;
};

struct PsiSpec {
  PsiFamily family = PsiFamily::constant;
  double p = 0.0;
  RadialProfile h;
  std::shared_ptr<const TabulatedField> table;
  int k = 2;
  int l = 0;

  static PsiSpec constant(double value, int k = 2, int l = 0);
  static PsiSpec power_theta(double p, RadialProfile h, int k = 2, int l = 0);
  static PsiSpec exp_theta(double p, RadialProfile h, int k = 2, int l = 0);
  static PsiSpec tabulated(std::shared_ptr<const TabulatedField> table, int k = 2, int l = 0);

  bool depends_on_theta() const noexcept {
    return family == PsiFamily::power_theta || family == PsiFamily::exp_theta;
  }
};

/// psi(x, u, theta) > 0. Throws InvalidPsiError on a non-positive value.
double eval_psi(const PsiSpec& spec, const ChartPoint& x, double u, double theta);

/// psi^{1/(k-l)}, evaluated per family without an intermediate power.
double eval_psi_root(const PsiSpec& spec, const ChartPoint& x, double u, double theta);

/// d(psi^{1/(k-l)}) / d theta. Throws UnsupportedDerivativeError for tables.
double dpsi_dtheta_power(const PsiSpec& spec, const ChartPoint& x, double u, double theta);

struct PsiSample {
  Vector y;
  double u = 1.0;
  double theta = -1.0;
};

struct StructuralReport {
  /// min of d(psi^{1/(k-l)})/d theta * theta - psi^{1/(k-l)}
  double condition_margin = 0.0;
  /// min second difference of psi^{1/(k-l)} in theta (convexity)
  double convexity_margin = 0.0;
  bool condition_holds = false;
  bool convexity_holds = false;
  int samples = 0;
};

/// Structural hypotheses on psi checked over the given samples. Violations
/// are reported, not thrown. Tolerance for the holds flags is 1e-8.
StructuralReport check_structural_conditions(const PsiSpec& spec,
                                             std::span<const PsiSample> samples);

}  // namespace hq

#include "hq/psispec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hq/errors.hpp"

namespace hq {

namespace {

constexpr double kSnap = 1e-9;

double snap(double pos) {
  const double r = std::round(pos);
  return std::abs(pos - r) < kSnap ? r : pos;
}

int root_order(const PsiSpec& spec) {
  const int m = spec.k - spec.l;
  if (m < 1) throw DomainError("psispec: need k > l");
  return m;
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

std::string to_string(PsiFamily family) {
  switch (family) {
    case PsiFamily::constant:
      return "constant";
    case PsiFamily::power_theta:
      return "power_theta";
    case PsiFamily::exp_theta:
      return "exp_theta";
    case PsiFamily::tabulated:
      return "tabulated";
  }
  return "unknown";
}

PsiFamily psi_family_from_string(const std::string& name) {
  if (name == "constant") return PsiFamily::constant;
  if (name == "power_theta") return PsiFamily::power_theta;
  if (name == "exp_theta") return PsiFamily::exp_theta;
  if (name == "tabulated") return PsiFamily::tabulated;
  throw ConfigError("unknown psi family '" + name + "'");
}

TabulatedField::TabulatedField(double r_chart, int n_rho, int n_theta,
                               std::vector<double> values)
    : r_chart_(r_chart), n_rho_(n_rho), n_theta_(n_theta), values_(std::move(values)) {
  if (!(r_chart > 0.0) || n_rho < 1 || n_theta < 1) {
    throw DomainError("TabulatedField: invalid grid parameters");
  }
  const auto expected = static_cast<std::size_t>(1 + n_rho * n_theta);
  if (values_.size() != expected) throw DomainError("TabulatedField: table size mismatch");
}

double TabulatedField::ring_value(int ring, double angle_pos) const {
  const int j0 = static_cast<int>(std::floor(angle_pos)) % n_theta_;
  const double w = angle_pos - std::floor(angle_pos);
  const int j1 = (j0 + 1) % n_theta_;
  const auto base = static_cast<std::size_t>(1 + (ring - 1) * n_theta_);
  const double a = values_[base + static_cast<std::size_t>(j0)];
  if (w == 0.0) return a;
  return (1.0 - w) * a + w * values_[base + static_cast<std::size_t>(j1)];
}

double TabulatedField::operator()(const Vector& y) const {
  if (y.size() != 2) throw DomainError("TabulatedField: only n = 2 is supported");
  const double h = r_chart_ / n_rho_;
  const double pos = std::min(snap(y.norm() / h), static_cast<double>(n_rho_));
  double angle = std::atan2(y(1), y(0));
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  double angle_pos = snap(angle / (2.0 * std::numbers::pi / n_theta_));
  if (angle_pos >= n_theta_) angle_pos -= n_theta_;

  if (pos < 1.0) {
    const double pole = values_[0];
    if (pos == 0.0) return pole;
    return (1.0 - pos) * pole + pos * ring_value(1, angle_pos);
  }
  const int i0 = static_cast<int>(std::floor(pos));
  const double w = pos - i0;
  if (i0 >= n_rho_ || w == 0.0) return ring_value(std::min(i0, n_rho_), angle_pos);
  return (1.0 - w) * ring_value(i0, angle_pos) + w * ring_value(i0 + 1, angle_pos);
}

PsiSpec PsiSpec::constant(double value, int k, int l) {
  PsiSpec s;
  s.family = PsiFamily::constant;
  s.h = RadialProfile{value, 0.0};
  s.k = k;
  s.l = l;
  return s;
}

PsiSpec PsiSpec::power_theta(double p, RadialProfile h, int k, int l) {
  PsiSpec s;
  s.family = PsiFamily::power_theta;
  s.p = p;
  s.h = h;
  s.k = k;
  s.l = l;
  return s;
}

PsiSpec PsiSpec::exp_theta(double p, RadialProfile h, int k, int l) {
  PsiSpec s = power_theta(p, h, k, l);
  s.family = PsiFamily::exp_theta;
  return s;
}

PsiSpec PsiSpec::tabulated(std::shared_ptr<const TabulatedField> table, int k, int l) {
  if (!table) throw DomainError("PsiSpec::tabulated: null table");
  PsiSpec s;
  s.family = PsiFamily::tabulated;
  s.table = std::move(table);
  s.k = k;
  s.l = l;
  return s;
}

double eval_psi(const PsiSpec& spec, const ChartPoint& x, double u, double theta) {
  if (!(u > 0.0)) throw DomainError("eval_psi: u must be positive");
  double value = 0.0;
  switch (spec.family) {
    case PsiFamily::constant:
      value = spec.h(geodesic_radius(x.y));
      break;
    case PsiFamily::power_theta:
      value = std::pow(std::abs(theta), spec.p) * spec.h(geodesic_radius(x.y));
      break;
    case PsiFamily::exp_theta:
      value = std::exp(spec.p * std::abs(theta) / u) * spec.h(geodesic_radius(x.y));
      break;
    case PsiFamily::tabulated:
      value = (*spec.table)(x.y);
      break;
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidPsiError("eval_psi: psi must be positive and finite, got " +
                          std::to_string(value));
  }
  return value;
}

double eval_psi_root(const PsiSpec& spec, const ChartPoint& x, double u, double theta) {
  const int m = root_order(spec);
  const double inv = 1.0 / m;
  switch (spec.family) {
    case PsiFamily::power_theta: {
      eval_psi(spec, x, u, theta);  // positivity check
      const double hr = std::pow(spec.h(geodesic_radius(x.y)), inv);
      return std::pow(std::abs(theta), spec.p * inv) * hr;
    }
    case PsiFamily::exp_theta: {
      eval_psi(spec, x, u, theta);
      const double hr = std::pow(spec.h(geodesic_radius(x.y)), inv);
      return std::exp(spec.p * inv * std::abs(theta) / u) * hr;
    }
    default: {
      const double value = eval_psi(spec, x, u, theta);
      return m == 1 ? value : (m == 2 ? std::sqrt(value) : std::pow(value, inv));
    }
  }
}

double dpsi_dtheta_power(const PsiSpec& spec, const ChartPoint& x, double u, double theta) {
  const int m = root_order(spec);
  const double q = spec.p / m;
  switch (spec.family) {
    case PsiFamily::constant:
      return 0.0;
    case PsiFamily::power_theta: {
      const double hr = std::pow(spec.h(geodesic_radius(x.y)), 1.0 / m);
      return q * std::pow(std::abs(theta), q - 1.0) * sign_of(theta) * hr;
    }
    case PsiFamily::exp_theta:
      return q / u * sign_of(theta) * eval_psi_root(spec, x, u, theta);
    case PsiFamily::tabulated:
      break;
  }
  throw UnsupportedDerivativeError("dpsi_dtheta_power: tabulated psi has no theta derivative");
}

StructuralReport check_structural_conditions(const PsiSpec& spec,
                                             std::span<const PsiSample> samples) {
  if (spec.family == PsiFamily::tabulated) {
    throw UnsupportedDerivativeError("check_structural_conditions: needs an analytic family");
  }
  StructuralReport rep;
  rep.condition_margin = std::numeric_limits<double>::infinity();
  rep.convexity_margin = std::numeric_limits<double>::infinity();
  for (const PsiSample& s : samples) {
    const ChartPoint x = make_chart_point(s.y);
    const double f = eval_psi_root(spec, x, s.u, s.theta);
    const double df = dpsi_dtheta_power(spec, x, s.u, s.theta);
    rep.condition_margin = std::min(rep.condition_margin, df * s.theta - f);

    // Second differences of a convex function are non-negative for any step;
    // a wide step keeps round-off small. The step never crosses theta = 0.
    const double step = 0.01 * std::abs(s.theta);
    const double fp = eval_psi_root(spec, x, s.u, s.theta + step);
    const double fm = eval_psi_root(spec, x, s.u, s.theta - step);
    rep.convexity_margin = std::min(rep.convexity_margin, (fp - 2.0 * f + fm) / (step * step));
    ++rep.samples;
  }
  if (rep.samples == 0) {
    rep.condition_margin = 0.0;
    rep.convexity_margin = 0.0;
  }
  rep.condition_holds = rep.samples > 0 && rep.condition_margin >= -1e-8;
  rep.convexity_holds = rep.samples > 0 && rep.convexity_margin >= -1e-8;
  return rep;
}

}  // namespace hq

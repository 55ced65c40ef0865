#include "hq/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hq/errors.hpp"

namespace hq {

namespace {

void validate(const GridSpec& spec) {
  if (!(spec.r_chart > 0.0) || !std::isfinite(spec.r_chart)) {
    throw ConfigError("grid: R_chart must be positive and finite");
  }
  if (spec.n_rho < 8) throw ConfigError("grid: N_rho must be >= 8");
  if (spec.n_theta < 16 || spec.n_theta % 2 != 0) {
    throw ConfigError("grid: N_theta must be an even integer >= 16");
  }
}

// Cartesian partials from polar derivatives at radius rho, angle (c, s).
NodePartials to_cartesian(double rho, double c, double s, double ur, double ut, double urr,
                          double utt, double urt) {
  NodePartials p;
  p.grad.resize(2);
  p.hess.resize(2, 2);
  const double ir = 1.0 / rho;
  const double ir2 = ir * ir;
  p.grad(0) = c * ur - s * ir * ut;
  p.grad(1) = s * ur + c * ir * ut;
  const double cs = c * s;
  const double cc = c * c;
  const double ss = s * s;
  const double xx = cc * urr - 2.0 * cs * ir * urt + ss * ir2 * utt + ss * ir * ur +
                    2.0 * cs * ir2 * ut;
  const double yy = ss * urr + 2.0 * cs * ir * urt + cc * ir2 * utt + cc * ir * ur -
                    2.0 * cs * ir2 * ut;
  const double xy = cs * urr + (cc - ss) * ir * urt - cs * ir2 * utt - cs * ir * ur -
                    (cc - ss) * ir2 * ut;
  p.hess(0, 0) = xx;
  p.hess(1, 1) = yy;
  p.hess(0, 1) = xy;
  p.hess(1, 0) = xy;
  return p;
}

}  // namespace

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  validate(spec_);
  step_ = spec_.r_chart / spec_.n_rho;
  angle_step_ = 2.0 * std::numbers::pi / spec_.n_theta;
  first_denom_ = 2.0 * std::sin(angle_step_);
  const double half = std::sin(0.5 * angle_step_);
  second_denom_ = 4.0 * half * half;

  cos_.resize(static_cast<std::size_t>(spec_.n_theta));
  sin_.resize(static_cast<std::size_t>(spec_.n_theta));
  for (int j = 0; j < spec_.n_theta; ++j) {
    cos_[static_cast<std::size_t>(j)] = std::cos(j * angle_step_);
    sin_[static_cast<std::size_t>(j)] = std::sin(j * angle_step_);
  }

  charts_.reserve(static_cast<std::size_t>(node_count()));
  for (int node = 0; node < node_count(); ++node) {
    const PolarIndex p = polar(node);
    Vector y(2);
    const double rho = p.ring * step_;
    y(0) = rho * cos_angle(p.angle);
    y(1) = rho * sin_angle(p.angle);
    charts_.push_back(make_chart_point(y));
  }

  const int nt = spec_.n_theta;
  const int nr = spec_.n_rho;
  stencil_offsets_.reserve(static_cast<std::size_t>(node_count()) + 1);
  stencil_offsets_.push_back(0);
  std::vector<int> buf;
  for (int node = 0; node < node_count(); ++node) {
    buf.clear();
    const PolarIndex p = polar(node);
    if (p.ring == 0) {
      buf.push_back(0);
      for (int j = 0; j < nt; ++j) buf.push_back(index({1, j}));
    } else {
      const int lo = p.ring == nr ? nr - 3 : p.ring - 1;
      const int hi = p.ring == nr ? nr : p.ring + 1;
      for (int r = lo; r <= hi; ++r) {
        for (int dj = -1; dj <= 1; ++dj) {
          buf.push_back(r == 0 ? 0 : index({r, (p.angle + dj + nt) % nt}));
        }
      }
    }
    std::sort(buf.begin(), buf.end());
    buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
    stencil_nodes_.insert(stencil_nodes_.end(), buf.begin(), buf.end());
    stencil_offsets_.push_back(static_cast<int>(stencil_nodes_.size()));
  }
}

int Grid::index(PolarIndex p) const {
  if (p.ring == 0) return 0;
  if (p.ring < 0 || p.ring > spec_.n_rho || p.angle < 0 || p.angle >= spec_.n_theta) {
    throw DomainError("Grid::index: polar index out of range");
  }
  return 1 + (p.ring - 1) * spec_.n_theta + p.angle;
}

PolarIndex Grid::polar(int node) const {
  if (node < 0 || node >= node_count()) throw DomainError("Grid::polar: node out of range");
  if (node == 0) return {0, 0};
  return {1 + (node - 1) / spec_.n_theta, (node - 1) % spec_.n_theta};
}

std::span<const int> Grid::stencil(int node) const {
  const auto b = static_cast<std::size_t>(stencil_offsets_[static_cast<std::size_t>(node)]);
  const auto e = static_cast<std::size_t>(stencil_offsets_[static_cast<std::size_t>(node) + 1]);
  return std::span<const int>(stencil_nodes_).subspan(b, e - b);
}

Grid build_grid(double r_chart, int n_rho, int n_theta) {
  return Grid(GridSpec{r_chart, n_rho, n_theta});
}

NodePartials node_partials(std::span<const double> values, const Grid& grid, int node) {
  if (values.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("node_partials: field length does not match the grid");
  }
  const int nt = grid.n_theta();
  const int nr = grid.n_rho();
  const double h = grid.step();
  auto at = [&](int ring, int j) {
    if (ring == 0) return values[0];
    return values[static_cast<std::size_t>(1 + (ring - 1) * nt + (j + nt) % nt)];
  };
  const PolarIndex p = grid.polar(node);

  if (p.ring == 0) {
    const double u0 = values[0];
    double m0 = 0.0, c1 = 0.0, s1 = 0.0, c2 = 0.0, s2 = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double d = at(1, j) - u0;
      const double c = grid.cos_angle(j);
      const double s = grid.sin_angle(j);
      m0 += d;
      c1 += c * d;
      s1 += s * d;
      c2 += (c * c - s * s) * d;
      s2 += 2.0 * c * s * d;
    }
    const double inv_n = 1.0 / nt;
    m0 *= inv_n;
    c1 *= 2.0 * inv_n;
    s1 *= 2.0 * inv_n;
    c2 *= 2.0 * inv_n;
    s2 *= 2.0 * inv_n;
    NodePartials out;
    out.grad.resize(2);
    out.hess.resize(2, 2);
    out.grad(0) = c1 / h;
    out.grad(1) = s1 / h;
    const double lap = 4.0 * m0 / (h * h);
    const double diff = 4.0 * c2 / (h * h);
    out.hess(0, 0) = 0.5 * (lap + diff);
    out.hess(1, 1) = 0.5 * (lap - diff);
    out.hess(0, 1) = 2.0 * s2 / (h * h);
    out.hess(1, 0) = out.hess(0, 1);
    return out;
  }

  const int i = p.ring;
  const int j = p.angle;
  const double d1 = grid.first_angle_denominator();
  const double d2 = grid.second_angle_denominator();
  auto angular_first = [&](int ring) {
    if (ring == 0) return 0.0;
    return (at(ring, j + 1) - at(ring, j - 1)) / d1;
  };
  const double uc = at(i, j);
  const double ut = angular_first(i);
  const double utt = ((at(i, j + 1) - uc) - (uc - at(i, j - 1))) / d2;

  double ur = 0.0, urr = 0.0, urt = 0.0;
  if (i < nr) {
    const double up = at(i + 1, j);
    const double um = at(i - 1, j);
    ur = (up - um) / (2.0 * h);
    urr = ((up - uc) - (uc - um)) / (h * h);
    urt = (angular_first(i + 1) - angular_first(i - 1)) / (2.0 * h);
  } else {
    const double e1 = uc - at(i - 1, j);
    const double e2 = at(i - 1, j) - at(i - 2, j);
    const double e3 = at(i - 2, j) - at(i - 3, j);
    ur = (3.0 * e1 - e2) / (2.0 * h);
    urr = (2.0 * e1 - 3.0 * e2 + e3) / (h * h);
    urt = (3.0 * ut - 4.0 * angular_first(i - 1) + angular_first(i - 2)) / (2.0 * h);
  }
  return to_cartesian(i * h, grid.cos_angle(j), grid.sin_angle(j), ur, ut, urr, utt, urt);
}

Partials fd_partials(const NodalField& field, const Grid& grid) {
  const int count = grid.node_count();
  if (field.size() != static_cast<std::size_t>(count)) {
    throw DomainError("fd_partials: field length does not match the grid");
  }
  Partials out;
  out.grad.resize(static_cast<std::size_t>(count));
  out.hess.resize(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (int node = 0; node < count; ++node) {
    NodePartials np = node_partials(field.values, grid, node);
    out.grad[static_cast<std::size_t>(node)] = np.grad;
    out.hess[static_cast<std::size_t>(node)] = np.hess;
  }
  return out;
}

BoundaryData BoundaryData::constant_value(double c) {
  BoundaryData d;
  d.kind = Kind::constant;
  d.c = c;
  return d;
}

BoundaryData BoundaryData::ambient_affine(std::array<double, 3> a, double b) {
  BoundaryData d;
  d.kind = Kind::ambient_affine;
  d.a = a;
  d.b = b;
  return d;
}

double BoundaryData::value_at(const Vector& y) const {
  if (kind == Kind::constant) return c;
  if (y.size() != 2) throw DomainError("BoundaryData: ambient-affine data needs n = 2");
  AmbientVector av(3);
  av << a[0], a[1], a[2];
  return lorentz_inner(av, embed(y)) + b;
}

NodalField apply_boundary(NodalField field, const BoundaryData& phi, const Grid& grid) {
  if (field.size() != static_cast<std::size_t>(grid.node_count())) {
    throw DomainError("apply_boundary: field length does not match the grid");
  }
  for (int node = grid.unknown_count(); node < grid.node_count(); ++node) {
    const double value = phi.value_at(grid.chart(node).y);
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw InvalidBoundaryError("apply_boundary: boundary value " + std::to_string(value) +
                                 " is not positive");
    }
    field[node] = value;
  }
  return field;
}

double mean_boundary_value(const BoundaryData& phi, const Grid& grid) {
  double sum = 0.0;
  for (int node = grid.unknown_count(); node < grid.node_count(); ++node) {
    sum += phi.value_at(grid.chart(node).y);
  }
  return sum / (grid.node_count() - grid.unknown_count());
}

}  // namespace hq

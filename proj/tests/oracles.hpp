#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's geometry; derivatives are central differences
// of the embedding y -> (y, sqrt(1 + |y|^2)).

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// sigma_k by summing products over all k-subsets.
inline double sigma_enum(const std::vector<double>& v, int k) {
  const int n = static_cast<int>(v.size());
  if (k < 0 || k > n) return 0.0;
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) prod *= v[static_cast<std::size_t>(i)];
    }
    sum += prod;
  }
  return sum;
}

inline double sigma_enum_excluding(std::vector<double> v, int k, int i) {
  v.erase(v.begin() + i);
  return sigma_enum(v, k);
}

/// sigma_k(|v|): scale for relative error checks.
inline double sigma_enum_abs(std::vector<double> v, int k) {
  for (double& x : v) x = std::abs(x);
  return sigma_enum(v, k);
}

using Field = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const Field& f, const Eigen::VectorXd& y, double h) {
  const auto n = y.size();
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = y, m = y;
    p(i) += h;
    m(i) -= h;
    g(i) = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

inline Eigen::MatrixXd fd_hessian(const Field& f, const Eigen::VectorXd& y, double h) {
  const auto n = y.size();
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd pp = y, pm = y, mp = y, mm = y;
      pp(i) += h; pp(j) += h;
      pm(i) += h; pm(j) -= h;
      mp(i) -= h; mp(j) += h;
      mm(i) -= h; mm(j) -= h;
      H(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  }
  return H;
}

inline double lorentz(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto n = a.size() - 1;
  return a.head(n).dot(b.head(n)) - a(n) * b(n);
}

inline Eigen::VectorXd embed(const Eigen::VectorXd& y) {
  Eigen::VectorXd x(y.size() + 1);
  x.head(y.size()) = y;
  x(y.size()) = std::sqrt(1.0 + y.squaredNorm());
  return x;
}

/// Columns d X / d y_i of a map into R^{n+1}, by central differences.
inline Eigen::MatrixXd fd_tangents(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& X,
                                   const Eigen::VectorXd& y, double h) {
  const auto n = y.size();
  Eigen::MatrixXd T(n + 1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = y, m = y;
    p(i) += h;
    m(i) -= h;
    T.col(i) = (X(p) - X(m)) / (2 * h);
  }
  return T;
}

/// d^2 X / d y_i d y_j for each (i, j).
inline std::vector<Eigen::VectorXd> fd_second(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& X, const Eigen::VectorXd& y,
    double h) {
  const auto n = y.size();
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd pp = y, pm = y, mp = y, mm = y;
      pp(i) += h; pp(j) += h;
      pm(i) += h; pm(j) -= h;
      mp(i) -= h; mp(j) += h;
      mm(i) -= h; mm(j) -= h;
      out[static_cast<std::size_t>(i * n + j)] = (X(pp) - X(pm) - X(mp) + X(mm)) / (4 * h * h);
    }
  }
  return out;
}

inline Eigen::MatrixXd metric_from_embedding(const Eigen::VectorXd& y, double h = 1e-5) {
  const Eigen::MatrixXd T = fd_tangents(embed, y, h);
  const auto n = y.size();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = lorentz(T.col(i), T.col(j));
  }
  return g;
}

/// Gamma^k_ij from central differences of the pulled-back metric.
inline std::vector<double> christoffels_fd(const Eigen::VectorXd& y, double h = 1e-4) {
  const auto n = y.size();
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) {
    Eigen::VectorXd p = y, m = y;
    p(l) += h;
    m(l) -= h;
    dg[static_cast<std::size_t>(l)] = (metric_from_embedding(p) - metric_from_embedding(m)) / (2 * h);
  }
  const Eigen::MatrixXd ginv = metric_from_embedding(y).inverse();
  std::vector<double> gamma(static_cast<std::size_t>(n * n * n), 0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
          s += ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) +
                             dg[static_cast<std::size_t>(j)](i, l) -
                             dg[static_cast<std::size_t>(l)](i, j));
        }
        gamma[static_cast<std::size_t>((k * n + i) * n + j)] = 0.5 * s;
      }
    }
  }
  return gamma;
}

/// Gamma^k_ij as the tangential part of d^2 X / dy_i dy_j.
inline std::vector<double> christoffels_ambient(const Eigen::VectorXd& y, double h = 1e-4) {
  const auto n = y.size();
  const Eigen::MatrixXd T = fd_tangents(embed, y, h);
  const auto X2 = fd_second(embed, y, h);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = lorentz(T.col(i), T.col(j));
  }
  const Eigen::MatrixXd ginv = g.inverse();
  std::vector<double> gamma(static_cast<std::size_t>(n * n * n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd proj(n);
      for (Eigen::Index l = 0; l < n; ++l) {
        proj(l) = lorentz(X2[static_cast<std::size_t>(i * n + j)], T.col(l));
      }
      const Eigen::VectorXd c = ginv * proj;
      for (Eigen::Index k = 0; k < n; ++k) gamma[static_cast<std::size_t>((k * n + i) * n + j)] = c(k);
    }
  }
  return gamma;
}

/// Gaussian curvature of a 2D metric (E, F, G) by the Brioschi formula.
inline double brioschi_curvature(const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& metric,
                                 const Eigen::Vector2d& y, double h) {
  auto comp = [&](int a, int b) {
    return [&, a, b](const Eigen::VectorXd& p) { return metric(Eigen::Vector2d(p(0), p(1)))(a, b); };
  };
  const Field E = comp(0, 0), F = comp(0, 1), G = comp(1, 1);
  const Eigen::VectorXd p = y;
  const double e = E(p), f = F(p), g = G(p);
  const Eigen::VectorXd dE = fd_gradient(E, p, h), dF = fd_gradient(F, p, h), dG = fd_gradient(G, p, h);
  const Eigen::MatrixXd hE = fd_hessian(E, p, h), hF = fd_hessian(F, p, h), hG = fd_hessian(G, p, h);
  const double Eu = dE(0), Ev = dE(1), Fu = dF(0), Fv = dF(1), Gu = dG(0), Gv = dG(1);
  const double Evv = hE(1, 1), Guu = hG(0, 0), Fuv = hF(0, 1);
  Eigen::Matrix3d a;
  a << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
       Fv - 0.5 * Gu, e, f,
       0.5 * Gv, f, g;
  Eigen::Matrix3d b;
  b << 0.0, 0.5 * Ev, 0.5 * Gu,
       0.5 * Ev, e, f,
       0.5 * Gu, f, g;
  const double w = e * g - f * f;
  return (a.determinant() - b.determinant()) / (w * w);
}

/// Principal curvatures of the radial graph Y = u(y) embed(y), from the
/// Lorentzian first and second fundamental forms of Y itself. The normal
/// is oriented so that u = c gives curvatures 1/c. Sorted descending.
inline std::vector<double> graph_curvatures_embedding(const Field& u, const Eigen::Vector2d& y,
                                                      double h = 1e-4) {
  auto Y = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd { return u(p) * embed(p); };
  const Eigen::VectorXd p = y;
  const Eigen::MatrixXd T = fd_tangents(Y, p, h);
  const auto Y2 = fd_second(Y, p, h);
  // nu Lorentz-orthogonal to both tangents: Euclidean cross product of the
  // rows J = T^T diag(1, 1, -1).
  Eigen::Vector3d r0(T(0, 0), T(1, 0), -T(2, 0));
  Eigen::Vector3d r1(T(0, 1), T(1, 1), -T(2, 1));
  Eigen::VectorXd nu = r0.cross(r1);
  nu /= std::sqrt(-lorentz(nu, nu));
  if (lorentz(nu, embed(p)) < 0) nu = -nu;
  Eigen::Matrix2d I, II;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      I(i, j) = lorentz(T.col(i), T.col(j));
      II(i, j) = lorentz(Y2[static_cast<std::size_t>(i * 2 + j)], nu);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(II, I);
  return {es.eigenvalues()(1), es.eigenvalues()(0)};
}

}  // namespace oracle

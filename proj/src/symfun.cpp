#include "hq/symfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hq/errors.hpp"

namespace hq {

namespace {

// e_m of the values (optionally skipping one index) by the one-pass
// recurrence e_j <- e_j + x * e_{j-1}, j descending.
double sigma_recurrence(std::span<const double> values, int m, int skip) {
  const int n = static_cast<int>(values.size()) - (skip >= 0 ? 1 : 0);
  if (m < 0 || m > n) return 0.0;
  if (m == 0) return 1.0;

  constexpr int kStack = 16;
  std::array<double, kStack + 1> stack{};
  std::vector<double> heap;
  double* e = stack.data();
  if (m > kStack) {
    heap.assign(static_cast<std::size_t>(m) + 1, 0.0);
    e = heap.data();
  }
  e[0] = 1.0;
  int seen = 0;
  for (int idx = 0; idx < static_cast<int>(values.size()); ++idx) {
    if (idx == skip) continue;
    const double x = values[static_cast<std::size_t>(idx)];
    ++seen;
    for (int j = std::min(m, seen); j >= 1; --j) e[j] += x * e[j - 1];
  }
#ifdef HQ_MUTATE_SIGMA
  if (m >= 2) return e[m] * (1.0 + 1e-6);
#endif
  return e[m];
}

void require_order(int k, int l, int n, const char* what) {
  if (l < 0 || k <= l || k > n) {
    throw DomainError(std::string(what) + ": need 0 <= l < k <= n, got k=" +
                      std::to_string(k) + " l=" + std::to_string(l) +
                      " n=" + std::to_string(n));
  }
}

}  // namespace

EigenTuple::EigenTuple(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("EigenTuple: n must be at least 1");
  for (double x : values_) {
    if (!std::isfinite(x)) throw DomainError("EigenTuple: non-finite entry");
  }
}

EigenTuple::EigenTuple(std::initializer_list<double> values)
    : EigenTuple(std::vector<double>(values)) {}

EigenTuple EigenTuple::scaled(double t) const {
  std::vector<double> out(values_);
  for (double& x : out) x *= t;
  return EigenTuple(std::move(out));
}

EigenTuple midpoint(const EigenTuple& a, const EigenTuple& b) {
  if (a.size() != b.size()) throw DomainError("midpoint: size mismatch");
  std::vector<double> out(static_cast<std::size_t>(a.size()));
  for (int i = 0; i < a.size(); ++i) out[static_cast<std::size_t>(i)] = 0.5 * (a[i] + b[i]);
  return EigenTuple(std::move(out));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / j;
  return std::round(c);
}

double sigma_ext(std::span<const double> values, int m) {
  return sigma_recurrence(values, m, -1);
}

double sigma_ext_excluding(std::span<const double> values, int m, int skip) {
  return sigma_recurrence(values, m, skip);
}

double elementary_symmetric(const EigenTuple& lam, int k) {
  if (k < 0 || k > lam.size()) {
    throw DomainError("elementary_symmetric: k=" + std::to_string(k) +
                      " outside [0, " + std::to_string(lam.size()) + "]");
  }
  return sigma_ext(lam.values(), k);
}

double sigma_excluding(const EigenTuple& lam, int k, int i) {
  if (i < 0 || i >= lam.size()) {
    throw DomainError("sigma_excluding: index " + std::to_string(i) + " out of range");
  }
  if (k < 0 || k > lam.size() - 1) {
    throw DomainError("sigma_excluding: k=" + std::to_string(k) + " outside [0, n-1]");
  }
  return sigma_ext_excluding(lam.values(), k, i);
}

double hessian_quotient(const EigenTuple& lam, int k, int l) {
  require_order(k, l, lam.size(), "hessian_quotient");
  const double sl = sigma_ext(lam.values(), l);
  if (sl == 0.0) throw SingularQuotientError("hessian_quotient: sigma_l vanishes");
  return sigma_ext(lam.values(), k) / sl;
}

std::vector<double> quotient_gradient(const EigenTuple& lam, int k, int l) {
  require_order(k, l, lam.size(), "quotient_gradient");
  const auto v = lam.values();
  const double sk = sigma_ext(v, k);
  const double sl = sigma_ext(v, l);
  if (sl == 0.0) throw SingularQuotientError("quotient_gradient: sigma_l vanishes");
  std::vector<double> grad(static_cast<std::size_t>(lam.size()));
  for (int i = 0; i < lam.size(); ++i) {
    const double num = sigma_ext_excluding(v, k - 1, i) * sl -
                       sk * sigma_ext_excluding(v, l - 1, i);
    grad[static_cast<std::size_t>(i)] = num / (sl * sl);
  }
  return grad;
}

bool in_gamma_cone(const EigenTuple& lam, int k) {
  if (k < 1 || k > lam.size()) {
    throw DomainError("in_gamma_cone: k=" + std::to_string(k) + " outside [1, n]");
  }
  for (int j = 1; j <= k; ++j) {
    if (!(sigma_ext(lam.values(), j) > 0.0)) return false;
  }
  return true;
}

double cone_margin(const EigenTuple& lam, int k) {
  if (k < 1 || k > lam.size()) {
    throw DomainError("cone_margin: k=" + std::to_string(k) + " outside [1, n]");
  }
  double m = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= k; ++j) m = std::min(m, sigma_ext(lam.values(), j));
  return m;
}

int gamma_level(const EigenTuple& lam) {
  int level = 0;
  for (int j = 1; j <= lam.size(); ++j) {
    if (!(sigma_ext(lam.values(), j) > 0.0)) break;
    level = j;
  }
  return level;
}

double quotient_power(const EigenTuple& lam, int k, int l) {
  require_order(k, l, lam.size(), "quotient_power");
  if (!in_gamma_cone(lam, k)) {
    throw AdmissibilityError("quotient_power: lambda not in Gamma_" + std::to_string(k));
  }
  const double q = sigma_ext(lam.values(), k) / sigma_ext(lam.values(), l);
  if (k - l == 1) return q;
  if (k - l == 2) return std::sqrt(q);
  return std::pow(q, 1.0 / (k - l));
}

double newton_maclaurin_margin(const EigenTuple& lam, int k, int l) {
  const int n = lam.size();
  if (l < 1 || k <= l || k > n) {
    throw DomainError("newton_maclaurin_margin: need 1 <= l < k <= n");
  }
  const auto v = lam.values();
  return sigma_ext(v, k - 1) / binomial(n, k - 1) * sigma_ext(v, l) / binomial(n, l) -
         sigma_ext(v, k) / binomial(n, k) * sigma_ext(v, l - 1) / binomial(n, l - 1);
}

double concavity_probe(const EigenTuple& a, const EigenTuple& b, int k, int l) {
  const double fa = quotient_power(a, k, l);
  const double fb = quotient_power(b, k, l);
  const EigenTuple mid = midpoint(a, b);
  // Gamma_k is convex, so the midpoint of two admissible tuples stays inside.
  if (!in_gamma_cone(mid, k)) {
    throw AdmissibilityError("concavity_probe: midpoint left Gamma_k");
  }
  return quotient_power(mid, k, l) - 0.5 * (fa + fb);
}

double matrix_sigma_quotient(const Eigen::MatrixXd& q, int k, int l) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  return hessian_quotient(EigenTuple(std::move(ev)), k, l);
}

double matrix_quotient(double p, const Eigen::VectorXd& dp, const Eigen::MatrixXd& q,
                       int k, int l) {
  const auto n = q.rows();
  if (q.cols() != n || dp.size() != n) throw DomainError("matrix_quotient: shape mismatch");
  if (!(p > 0.0)) throw DomainError("matrix_quotient: p must be positive");
  const double gap = p * p - dp.squaredNorm();
  if (!(gap > 0.0)) {
    throw NonSpacelikeError("matrix_quotient: |Dp| >= p", 1.0 - dp.norm() / p);
  }
  const Eigen::MatrixXd ginv =
      (Eigen::MatrixXd::Identity(n, n) + dp * dp.transpose() / gap) / (p * p);
  // g q is similar to L^T q L with g = L L^T, which is symmetric.
  const Eigen::LLT<Eigen::MatrixXd> llt(ginv);
  const Eigen::MatrixXd lower = llt.matrixL();
  const Eigen::MatrixXd sym = lower.transpose() * q.selfadjointView<Eigen::Lower>() * lower;
  return matrix_sigma_quotient(0.5 * (sym + sym.transpose()), k, l);
}

EigenTuple sample_gamma_cone(std::mt19937_64& rng, int n, int k) {
  std::uniform_real_distribution<double> dist(-1.0, 3.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (;;) {
    for (double& x : v) x = dist(rng);
    EigenTuple lam(v);
    if (in_gamma_cone(lam, k)) return lam;
  }
}

B0Estimate estimate_b0(long long samples, int n, int k, int l, std::uint64_t seed) {
  if (samples < 1) throw DomainError("estimate_b0: samples must be >= 1");
  require_order(k, l, n, "estimate_b0");
  std::mt19937_64 rng(seed);
  B0Estimate out;
  for (long long s = 0; s < samples; ++s) {
    const EigenTuple lam = sample_gamma_cone(rng, n, k);
    const double f = hessian_quotient(lam, k, l);
    const std::vector<double> grad = quotient_gradient(lam, k, l);
    for (int i = 0; i < n; ++i) {
      const double own = grad[static_cast<std::size_t>(i)] * lam[i] * lam[i];
      double denom = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) denom += grad[static_cast<std::size_t>(j)] * lam[j] * lam[j];
      }
      if (!(denom > 1e-300) || !std::isfinite(denom)) {
        ++out.skipped;
        continue;
      }
      const double ratio = (own - lam[i] * f) / denom;
      if (std::isfinite(ratio)) out.value = std::max(out.value, ratio);
    }
    ++out.accepted;
  }
  return out;
}

}  // namespace hq

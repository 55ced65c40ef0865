#pragma once

// Elementary symmetric functions, Hessian quotients and Garding cones for
// tuples of arbitrary length n.
//
// Conventions: sigma_0 = 1; sigma_m = 0 for m < 0 or m > n (sigma_ext).
// The strict accessor elementary_symmetric() rejects k outside [0, n].

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hq {

/// Ordered principal curvatures (lambda_1, ..., lambda_n), n >= 1, finite.
class EigenTuple {
 public:
  EigenTuple() = default;
  explicit EigenTuple(std::vector<double> values);
  EigenTuple(std::initializer_list<double> values);

  int size() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const noexcept { return values_; }

  EigenTuple scaled(double t) const;

  friend bool operator==(const EigenTuple&, const EigenTuple&) = default;

 private:
  std::vector<double> values_;
};

EigenTuple midpoint(const EigenTuple& a, const EigenTuple& b);

/// Binomial coefficient C(n, k) as a double; 0 outside 0 <= k <= n.
double binomial(int n, int k);

/// sigma_m of the values with the total-function convention (1 at m = 0,
/// 0 for m < 0 or m > n).
double sigma_ext(std::span<const double> values, int m);

/// sigma_m of the values with entry `skip` removed, same convention.
double sigma_ext_excluding(std::span<const double> values, int m, int skip);

/// sigma_k(lambda). Throws DomainError unless 0 <= k <= n.
double elementary_symmetric(const EigenTuple& lam, int k);

/// sigma_k(lambda | i): entry i (zero-based) removed. Requires 0 <= k <= n-1.
double sigma_excluding(const EigenTuple& lam, int k, int i);

/// sigma_k / sigma_l. Requires 0 <= l < k <= n. Throws SingularQuotientError
/// when sigma_l vanishes.
double hessian_quotient(const EigenTuple& lam, int k, int l);

/// d(sigma_k / sigma_l) / d lambda_i for every i.
std::vector<double> quotient_gradient(const EigenTuple& lam, int k, int l);

/// sigma_j(lambda) > 0 for j = 1..k, strict with no tolerance.
bool in_gamma_cone(const EigenTuple& lam, int k);

/// min_{1<=j<=k} sigma_j(lambda). Positive iff lambda lies in Gamma_k.
double cone_margin(const EigenTuple& lam, int k);

/// Largest k with lambda in Gamma_k (0 if sigma_1 <= 0).
int gamma_level(const EigenTuple& lam);

/// (sigma_k / sigma_l)^{1/(k-l)}; throws AdmissibilityError outside Gamma_k.
double quotient_power(const EigenTuple& lam, int k, int l);

/// Generalized Newton-Maclaurin margin
///   sigma_{k-1}/C(n,k-1) * sigma_l/C(n,l) - sigma_k/C(n,k) * sigma_{l-1}/C(n,l-1),
/// non-negative on Gamma_k for 1 <= l < k <= n. Returned raw.
double newton_maclaurin_margin(const EigenTuple& lam, int k, int l);

/// F((a+b)/2) - (F(a)+F(b))/2 for F = quotient_power; >= 0 by concavity.
double concavity_probe(const EigenTuple& a, const EigenTuple& b, int k, int l);

/// F_k/F_l of the eigenvalues of a symmetric matrix q.
double matrix_sigma_quotient(const Eigen::MatrixXd& q, int k, int l);

/// F_k/F_l of the eigenvalues of g^{ij}(Dp) q with
///   g^{ij}(Dp) = (delta_ij + p_i p_j / (p^2 - |Dp|^2)) / p^2.
/// Throws NonSpacelikeError when |Dp| >= p.
double matrix_quotient(double p, const Eigen::VectorXd& dp, const Eigen::MatrixXd& q,
                       int k, int l);

/// Draws lambda uniformly from [-1, 3]^n and rejects until lambda is in
/// Gamma_k.
EigenTuple sample_gamma_cone(std::mt19937_64& rng, int n, int k);

struct B0Estimate {
  double value = 0.0;        ///< empirical sup, clamped below at 0
  long long accepted = 0;    ///< cone samples evaluated
  long long skipped = 0;     ///< (sample, i) pairs with a degenerate denominator
};

/// Empirical supremum of
///   ((sigma_k/sigma_l)_i lambda_i^2 - lambda_i sigma_k/sigma_l)
///     / sum_{j != i} (sigma_k/sigma_l)_j lambda_j^2
/// over `samples` cone points and all i.
B0Estimate estimate_b0(long long samples, int n, int k, int l, std::uint64_t seed);

}  // namespace hq

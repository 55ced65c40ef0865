#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "hq/errors.hpp"
#include "hq/symfun.hpp"
#include "oracles.hpp"

using namespace hq;

TEST_SUITE("symfun") {

TEST_CASE("elementary_symmetric examples") {
  CHECK(elementary_symmetric({1, 1, 1}, 2) == 3.0);
  CHECK(elementary_symmetric({1, 2, 3}, 2) == 11.0);
  CHECK(elementary_symmetric({1, 2, 3}, 0) == 1.0);
  CHECK(elementary_symmetric({-4.5}, 0) == 1.0);
  CHECK_THROWS_AS(elementary_symmetric({1, 2, 3}, 4), DomainError);
  CHECK_THROWS_AS(elementary_symmetric({1, 2, 3}, -1), DomainError);
}

TEST_CASE("sigma_ext conventions") {
  const std::vector<double> v{1, 2, 3};
  CHECK(sigma_ext(v, -1) == 0.0);
  CHECK(sigma_ext(v, 4) == 0.0);
  CHECK(sigma_ext(v, 3) == 6.0);
}

TEST_CASE("EigenTuple rejects empty and non-finite input") {
  CHECK_THROWS_AS(EigenTuple(std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(EigenTuple({1.0, std::nan("")}), DomainError);
}

TEST_CASE("sigma_excluding examples") {
  CHECK(sigma_excluding({1, 2, 3}, 1, 0) == 5.0);
  for (int i = 0; i < 3; ++i) CHECK(sigma_excluding({1, 2, 3}, 0, i) == 1.0);
  CHECK(sigma_excluding({4}, 0, 0) == 1.0);
  CHECK_THROWS_AS(sigma_excluding({1, 2, 3}, 1, 3), DomainError);
  CHECK_THROWS_AS(sigma_excluding({1, 2, 3}, 1, -1), DomainError);
}

TEST_CASE("hessian_quotient examples") {
  CHECK(hessian_quotient({1, 2, 3}, 2, 0) == 11.0);
  CHECK(hessian_quotient({1, 1}, 2, 0) == 1.0);
  for (int n = 2; n <= 6; ++n) {
    for (int k = 2; k <= n; ++k) {
      for (int l = 0; l <= k - 2; ++l) {
        const double c = 0.7;
        const EigenTuple lam(std::vector<double>(static_cast<std::size_t>(n), c));
        const double expected = binomial(n, k) / binomial(n, l) * std::pow(c, k - l);
        CHECK(hessian_quotient(lam, k, l) == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS_AS(hessian_quotient({1, -1, 0}, 3, 1), SingularQuotientError);
}

TEST_CASE("quotient_gradient examples") {
  const auto g = quotient_gradient({1, 2, 3}, 2, 0);
  CHECK(g == std::vector<double>{5, 4, 3});
  CHECK(quotient_gradient({1, 1, 1}, 2, 0) == std::vector<double>{2, 2, 2});
  CHECK_THROWS_AS(quotient_gradient({1, -1, 0}, 3, 1), SingularQuotientError);
}

TEST_CASE("quotient_gradient matches central differences on the cone") {
  std::mt19937_64 rng(11);
  const std::vector<std::array<int, 3>> triples{{2, 2, 0}, {3, 2, 0}, {3, 3, 1}, {4, 3, 0}, {5, 4, 2}};
  double worst = 0.0;
  for (const auto& [n, k, l] : triples) {
    for (int s = 0; s < 200; ++s) {
      const EigenTuple lam = sample_gamma_cone(rng, n, k);
      const auto grad = quotient_gradient(lam, k, l);
      std::vector<double> v(lam.values().begin(), lam.values().end());
      for (int i = 0; i < n; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(v[static_cast<std::size_t>(i)]));
        auto p = v, m = v;
        p[static_cast<std::size_t>(i)] += h;
        m[static_cast<std::size_t>(i)] -= h;
        const double fd = (oracle::sigma_enum(p, k) / oracle::sigma_enum(p, l) -
                           oracle::sigma_enum(m, k) / oracle::sigma_enum(m, l)) / (2 * h);
        const double scale = std::max(std::abs(fd), 1e-3 * hessian_quotient(lam, k, l) + 1e-12);
        worst = std::max(worst, std::abs(grad[static_cast<std::size_t>(i)] - fd) / scale);
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("in_gamma_cone examples") {
  CHECK(in_gamma_cone({1, 2, 3}, 3));
  CHECK(in_gamma_cone({-1, 5, 5}, 2));
  CHECK_FALSE(in_gamma_cone({-1, 5, 5}, 3));
  for (int k = 1; k <= 4; ++k) CHECK_FALSE(in_gamma_cone({0, 0, 0, 0}, k));
  CHECK(cone_margin({1, 2, 3}, 3) == 6.0);
  CHECK(gamma_level({-1, 5, 5}) == 2);
  CHECK_THROWS_AS(in_gamma_cone({1, 2}, 3), DomainError);
}

TEST_CASE("quotient_power examples") {
  CHECK(quotient_power({1, 2, 3}, 2, 0) == doctest::Approx(std::sqrt(11.0)).epsilon(1e-15));
  CHECK(quotient_power({1, 1}, 2, 0) == doctest::Approx(1.0).epsilon(1e-15));
  for (int n = 2; n <= 5; ++n) {
    const double c = 1.3;
    const EigenTuple lam(std::vector<double>(static_cast<std::size_t>(n), c));
    const double expected = std::pow(binomial(n, 2), 0.5) * c;
    CHECK(quotient_power(lam, 2, 0) == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK_THROWS_AS(quotient_power({-1, 5, 5}, 3, 1), AdmissibilityError);
}

TEST_CASE("quotient_power is homogeneous of degree one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tdist(0.1, 10.0);
  for (int s = 0; s < 500; ++s) {
    const EigenTuple lam = sample_gamma_cone(rng, 4, 3);
    const double t = tdist(rng);
    const double lhs = quotient_power(lam.scaled(t), 3, 1);
    CHECK(std::abs(lhs - t * quotient_power(lam, 3, 1)) <= 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("symmetric functions are permutation invariant") {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 200; ++s) {
    const EigenTuple lam = sample_gamma_cone(rng, 5, 2);
    std::vector<double> v(lam.values().begin(), lam.values().end());
    std::shuffle(v.begin(), v.end(), rng);
    const EigenTuple perm(v);
    for (int k = 0; k <= 5; ++k) {
      const double a = elementary_symmetric(lam, k);
      const double b = elementary_symmetric(perm, k);
      CHECK(std::abs(a - b) <= 1e-13 * oracle::sigma_enum_abs(v, k));
    }
    CHECK(quotient_power(lam, 2, 0) == doctest::Approx(quotient_power(perm, 2, 0)).epsilon(1e-14));
  }
}

TEST_CASE("elementary_symmetric agrees with subset enumeration") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int s = 0; s < 300; ++s) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v) x = dist(rng);
        const double err = std::abs(elementary_symmetric(EigenTuple(v), k) - oracle::sigma_enum(v, k));
        worst = std::max(worst, err / oracle::sigma_enum_abs(v, k));
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("newton_maclaurin_margin") {
  CHECK(std::abs(newton_maclaurin_margin({1, 1, 1}, 2, 1)) <= 1e-15);
  CHECK(newton_maclaurin_margin({1, 2, 3}, 2, 1) > 0.0);
  std::mt19937_64 rng(23);
  double worst = 1.0;
  for (int s = 0; s < 10000; ++s) {
    const EigenTuple lam = sample_gamma_cone(rng, 4, 3);
    worst = std::min(worst, newton_maclaurin_margin(lam, 3, 2));
  }
  CHECK(worst >= -1e-12);
  CHECK_THROWS_AS(newton_maclaurin_margin({1, 2, 3}, 2, 0), DomainError);
}

TEST_CASE("concavity_probe") {
  const EigenTuple a{1, 2, 3};
  CHECK(concavity_probe(a, a, 2, 0) == doctest::Approx(0.0));
  // F(1,2,3) = F(3,2,1) = sqrt(11) and F(2,2,2) = sqrt(12).
  CHECK(concavity_probe({1, 2, 3}, {3, 2, 1}, 2, 0) ==
        doctest::Approx(std::sqrt(12.0) - std::sqrt(11.0)).epsilon(1e-13));
  CHECK(midpoint({1, 2, 3}, {3, 2, 1}) == EigenTuple{2, 2, 2});
  std::mt19937_64 rng(29);
  double worst = 1.0;
  for (int n = 2; n <= 5; ++n) {
    for (int s = 0; s < 2500; ++s) {
      const EigenTuple x = sample_gamma_cone(rng, n, 2);
      const EigenTuple y = sample_gamma_cone(rng, n, 2);
      worst = std::min(worst, concavity_probe(x, y, 2, 0));
    }
  }
  CHECK(worst >= -1e-10);
}

TEST_CASE("matrix_quotient examples") {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK(matrix_quotient(1.0, zero, Eigen::MatrixXd::Identity(3, 3), 2, 0) ==
        doctest::Approx(3.0).epsilon(1e-14));

  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  for (int s = 0; s < 50; ++s) {
    Eigen::MatrixXd b(3, 3);
    for (int i = 0; i < 9; ++i) b(i / 3, i % 3) = nd(rng);
    const Eigen::MatrixXd q = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(3, 3);
    const double p = 1.7;
    const double expected = matrix_sigma_quotient(q, 2, 0) / std::pow(p, 4);
    CHECK(matrix_quotient(p, zero, q, 2, 0) == doctest::Approx(expected).epsilon(1e-12));
  }

  Eigen::VectorXd dp(3);
  dp << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(matrix_quotient(1.0, dp, Eigen::MatrixXd::Identity(3, 3), 2, 0),
                  NonSpacelikeError);
}

TEST_CASE("matrix_quotient lower bound on non-negative matrices") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 1.0;
  for (int s = 0; s < 2000; ++s) {
    const int n = 3;
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n * n; ++i) b(i / n, i % n) = nd(rng);
    const Eigen::MatrixXd q = b * b.transpose();
    const double p = 0.5 + 1.5 * ud(rng);
    Eigen::VectorXd dp(n);
    for (int i = 0; i < n; ++i) dp(i) = nd(rng);
    const double rho = 0.9 * ud(rng);
    dp *= rho * p / dp.norm();
    const double value = matrix_quotient(p, dp, q, 2, 0);
    const double bound = (1 - rho * rho) * std::pow(p, -4) * matrix_sigma_quotient(q, 2, 0);
    if (bound > 0) worst = std::min(worst, value / bound - 1.0);
  }
  CHECK(worst >= -1e-10);
}

TEST_CASE("estimate_b0") {
  const B0Estimate once = estimate_b0(1, 3, 2, 0, 42);
  const B0Estimate again = estimate_b0(1, 3, 2, 0, 42);
  CHECK(once.value == again.value);
  CHECK(once.accepted == again.accepted);
  CHECK(once.value >= 0.0);

  const B0Estimate a = estimate_b0(100000, 3, 2, 0, 7);
  const B0Estimate b = estimate_b0(100000, 3, 2, 0, 8);
  CHECK(std::isfinite(a.value));
  CHECK(a.value > 0.0);
  CHECK(std::abs(a.value - b.value) <= 0.1 * std::max(a.value, b.value));
}

TEST_CASE("umbilic tuples contribute nothing to the B0 ratio") {
  // At lambda = (c, ..., c) the numerator is c^2 f_1 - c f and the
  // denominator (n-1) c^2 f_1; for sigma_2 on n = 3: f = 3c^2, f_1 = 2c.
  const double c = 1.5;
  const EigenTuple lam{c, c, c};
  const auto grad = quotient_gradient(lam, 2, 0);
  const double f = hessian_quotient(lam, 2, 0);
  const double ratio = (grad[0] * c * c - c * f) / (grad[1] * c * c + grad[2] * c * c);
  CHECK(ratio <= 0.0);
  CHECK(std::max(0.0, ratio) == 0.0);
}

TEST_CASE("sample_gamma_cone stays in the cone") {
  std::mt19937_64 rng(41);
  for (int s = 0; s < 1000; ++s) {
    const EigenTuple lam = sample_gamma_cone(rng, 4, 2);
    CHECK(lam.size() == 4);
    CHECK(oracle::sigma_enum({lam[0], lam[1], lam[2], lam[3]}, 1) > 0);
    CHECK(oracle::sigma_enum({lam[0], lam[1], lam[2], lam[3]}, 2) > 0);
  }
}

}

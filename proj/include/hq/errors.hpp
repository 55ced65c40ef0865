#pragma once

#include <stdexcept>
#include <string>

namespace hq {

/// Precondition or domain violation in a numerical routine.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// sigma_l vanished in a Hessian quotient.
class SingularQuotientError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Principal curvatures left the Garding cone Gamma_k.
class AdmissibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// |Du|_sigma >= u: the graph is not spacelike. Carries 1 - |Du|/u.
class NonSpacelikeError : public DomainError {
 public:
  NonSpacelikeError(const std::string& what, double margin)
      : DomainError(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

class GeometryError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidPsiError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedDerivativeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidBoundaryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or out-of-range run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hq

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lefg {

enum class ErrorKind { precondition, budget, inexact, consistency, certificate };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Caller broke an operation's precondition (includes out-of-range arguments).
class PreconditionError : public Error {
public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::precondition, what) {}
};

class BudgetError : public Error {
public:
  explicit BudgetError(const std::string& what) : Error(ErrorKind::budget, what) {}
};

/// A value could not be certified exact; carries the best lower bound found.
class InexactResult : public Error {
public:
  InexactResult(const std::string& what, double lower_bound)
      : Error(ErrorKind::inexact, what), lower_bound_(lower_bound) {}

  double lower_bound() const noexcept { return lower_bound_; }

private:
  double lower_bound_;
};

/// An invariant that must hold by construction was violated. Always a bug or corrupt input.
class ConsistencyError : public Error {
public:
  explicit ConsistencyError(const std::string& what) : Error(ErrorKind::consistency, what) {}
};

class CertificateFailure : public Error {
public:
  explicit CertificateFailure(const std::string& what) : Error(ErrorKind::certificate, what) {}
};

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::precondition: return 2;
    case ErrorKind::budget:
    case ErrorKind::inexact: return 3;
    case ErrorKind::consistency:
    case ErrorKind::certificate: return 4;
  }
  return 4;
}

/// Hard limits shared by the scan and enumeration kernels.
struct Budget {
  std::size_t window = 100'000'000;  // symbols materialized per source
  std::size_t ball = 1'000'000;      // elements per word-length ball
};

}  // namespace lefg

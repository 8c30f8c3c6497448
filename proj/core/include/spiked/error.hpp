#pragma once

#include <stdexcept>
#include <string>

namespace spiked {

// A formula or experiment was asked for outside the range where it holds
// (lambda >= 1 for the CLT limits, lambda >= lambda_c, zero-variance prior).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical routine did not reach its stated accuracy: quadrature doubling,
// finite-difference cross-validation, bisection bracket, MCMC diagnostics.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spiked

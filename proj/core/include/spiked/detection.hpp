#pragma once

#include <string>
#include <vector>

#include "spiked/prior.hpp"

namespace spiked {

/// mu(lambda) = (-log(1 - lambda) - lambda) / 4 for lambda in [0, 1).
///
/// Below lambda_c, log L converges to N(+mu, 2 mu) under the planted model
/// and to N(-mu, 2 mu) under the null (diagonal discarded). Throws
/// DomainError for lambda outside [0, 1).
double mu(double lambda);

/// Diagonal-kept variant with noise level sigma on Y_ii:
///   mu = (-log(1 - lambda) - lambda)(1 + kappa / sigma^2) / 4 + lambda / (2 sigma^2),
/// kappa = E[X^3]^2. The limiting law keeps the N(+-mu, 2 mu) form.
double mu_with_diagonal(const Prior& prior, double lambda, double sigma);

/// Limit of the minimal total error P_lambda(L <= 1) + P_0(L > 1):
/// erfc(sqrt(mu) / 2).
double optimal_error(double lambda);

/// Common limit of each error type, erfc(sqrt(mu) / 2) / 2.
double optimal_error_per_type(double lambda);

/// lim D_KL(P_lambda, P_0); equal to mu(lambda).
double kl_limit(double lambda);

/// lim D_TV(P_lambda, P_0) = 1 - optimal_error(lambda).
double tv_limit(double lambda);

struct DetectionCurves {
  std::vector<double> lambda_grid;
  std::vector<double> mu;
  std::vector<double> mean_null;
  std::vector<double> mean_alt;
  std::vector<double> variance;
  std::vector<double> err_star;
  std::vector<double> kl;
  std::vector<double> tv;
};

/// Tabulates the limits on a grid that must lie in [0, lambda_c); any point at
/// or above lambda_c (or >= 1) throws DomainError.
DetectionCurves curves(double lambda_c, const std::vector<double>& lambda_grid);

/// As above with lambda_c computed from the prior.
DetectionCurves curves(const Prior& prior, const std::vector<double>& lambda_grid);

/// Header `lambda,mu,mean_null,mean_alt,variance,err_star,kl,tv`.
std::string to_csv(const DetectionCurves& curves);

}  // namespace spiked

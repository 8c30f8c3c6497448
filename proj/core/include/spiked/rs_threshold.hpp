#pragma once

#include <string>
#include <vector>

#include "spiked/prior.hpp"
#include "spiked/scalar_channel.hpp"

namespace spiked {

/// Replica-symmetric potential F(lambda, q) = psi(lambda q) - lambda q^2 / 4.
double rs_potential(const Prior& prior, double lambda, double q, const ChannelOptions& options = {});

struct RSMaximum {
  double q_star = 0.0;
  double phi_rs = 0.0;
};

/// Global maximum of F(lambda, .) over q in [0, 1.1 E[X^2]]: dense grid scan
/// (step 1e-3 E[X^2]), golden-section refinement of every interior grid
/// local maximum to 1e-8, and the largest maximizer among candidates whose
/// values tie within 1e-9.
RSMaximum maximize_rs(const Prior& prior, double lambda, const ChannelOptions& options = {});

struct ReconstructionThreshold {
  double lambda_c = 0.0;
  // False when the prior is not centered; lambda_c is then 0 by definition.
  bool prior_centered = true;
};

/// lambda_c = sup{lambda > 0 : q*(lambda) = 0}, by bisection on the monotone
/// indicator q*(lambda) > q_tol over (0, 4 * spectral_threshold] down to an
/// absolute width of 1e-5 * min(1, spectral_threshold).
ReconstructionThreshold reconstruction_threshold(const Prior& prior, double q_tol = 1e-6);

/// (E[X^2])^-2. Throws DomainError for a zero-variance prior.
double spectral_threshold(const Prior& prior);

/// Critical sparsity of the sparse Rademacher family: the smallest rho for
/// which lambda_c(sparse_rademacher(rho)) = 1, found by bisection on the
/// indicator q*(lambda = 1) > q_tol to width `tol`.
double rho_star(double tol = 1e-4, double q_tol = 1e-6);

struct RSReport {
  std::vector<double> lambda_grid;
  std::vector<double> q_star;
  std::vector<double> phi_rs;
  double lambda_c = 0.0;
  double spectral_threshold = 0.0;
  bool prior_centered = true;
};

/// Evaluates q* and phi_RS on the grid (in parallel, deterministic order)
/// together with lambda_c and the spectral threshold.
RSReport rs_report(const Prior& prior, const std::vector<double>& lambda_grid);

/// CSV with header `lambda,q_star,phi_rs`.
std::string to_csv(const RSReport& report);
/// JSON object with the CSV columns plus lambda_c and spectral_threshold.
std::string to_json(const RSReport& report);

}  // namespace spiked

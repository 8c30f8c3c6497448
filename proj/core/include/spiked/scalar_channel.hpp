#pragma once

#include <span>

#include "spiked/prior.hpp"

namespace spiked {

/// Accuracy controls for the Gaussian expectation E_z[.] in the scalar
/// channel. The rule order is doubled until two successive orders agree to
/// `tolerance` (relative to max(1, |value|)) or `max_order` is reached.
struct ChannelOptions {
  int order = 80;
  int max_order = 640;
  double tolerance = 1e-10;
  bool adaptive = true;
};

/// E_z log sum_k exp(slope_k z + intercept_k), z ~ N(0, 1).
///
/// Intercepts of -inf are allowed and drop the term. The real line is cut at
/// the breakpoints of the upper envelope of the affine exponents and each
/// piece of [-12, 12] gets a Gauss-Legendre rule of the given order, so the
/// soft kinks of the integrand never fall inside a panel.
double expected_log_sum_exp(std::span<const double> slopes, std::span<const double> intercepts,
                            int order);

/// psi(r) = E_{x*, z} log E_x exp(sqrt(r) z x + r x x* - r x^2 / 2).
///
/// This is the mutual information style free energy of the scalar channel
/// y = sqrt(r) x* + z; it is >= 0, nondecreasing and convex in r, psi(0) = 0.
double psi(const Prior& prior, double r, const ChannelOptions& options = {});

/// psi_hat(r, s) = E_z log E_x exp(sqrt(r) z x + s x - r x^2 / 2).
double psi_hat(const Prior& prior, double r, double s, const ChannelOptions& options = {});

/// psi_bar(r, s) = E_{x*} psi_hat(r, s x*); psi_bar(r, r) == psi(r).
double psi_bar(const Prior& prior, double r, double s, const ChannelOptions& options = {});

struct PsiDerivatives {
  double d1 = 0.0;  // psi'(0) = E[X]^2 / 2
  double d2 = 0.0;  // psi''(0) = E[X^2]^2 / 2
  double d3 = 0.0;  // psi'''(0), numerical
  double d3_cross_check = 0.0;
};

/// d1 and d2 come from exact moments. d3 is a 7-point third-derivative
/// stencil centred at 3h (psi is only defined for r >= 0), Richardson
/// extrapolated over h, h/2, h/4, h/8 to remove the offset bias up to O(h^3).
/// Two independent spacing ladders must agree to 1e-3 relative, otherwise
/// ConvergenceError is thrown.
PsiDerivatives psi_derivatives_at_zero(const Prior& prior);

}  // namespace spiked

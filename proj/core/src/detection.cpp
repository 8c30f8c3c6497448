#include "spiked/detection.hpp"

#include <cmath>
#include <stdexcept>

#include "format.hpp"
#include "spiked/error.hpp"
#include "spiked/rs_threshold.hpp"

namespace spiked {
namespace {

void require_clt_range(double lambda, const char* what) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw DomainError(std::string(what) + ": lambda must lie in [0, 1)");
  }
}

}  // namespace

double mu(double lambda) {
  require_clt_range(lambda, "mu");
  return 0.25 * (-std::log1p(-lambda) - lambda);
}

double mu_with_diagonal(const Prior& prior, double lambda, double sigma) {
  require_clt_range(lambda, "mu_with_diagonal");
  if (!(sigma > 0.0)) throw DomainError("mu_with_diagonal: sigma must be > 0");
  const double m3 = prior.moment(3);
  const double kappa = m3 * m3;
  const double s2 = sigma * sigma;
  return mu(lambda) * (1.0 + kappa / s2) + lambda / (2.0 * s2);
}

double optimal_error(double lambda) { return std::erfc(0.5 * std::sqrt(mu(lambda))); }

double optimal_error_per_type(double lambda) { return 0.5 * optimal_error(lambda); }

double kl_limit(double lambda) { return mu(lambda); }

double tv_limit(double lambda) { return 1.0 - optimal_error(lambda); }

DetectionCurves curves(double lambda_c, const std::vector<double>& lambda_grid) {
  DetectionCurves c;
  for (double lambda : lambda_grid) {
    if (!(lambda >= 0.0) || lambda >= lambda_c || lambda >= 1.0) {
      throw DomainError("curves: lambda = " + detail::format_double(lambda) +
                        " is outside the validity range [0, lambda_c = " +
                        detail::format_double(lambda_c) + ")");
    }
    const double m = mu(lambda);
    c.lambda_grid.push_back(lambda);
    c.mu.push_back(m);
    c.mean_null.push_back(0.0 - m);
    c.mean_alt.push_back(m);
    c.variance.push_back(2.0 * m);
    c.err_star.push_back(optimal_error(lambda));
    c.kl.push_back(kl_limit(lambda));
    c.tv.push_back(tv_limit(lambda));
  }
  return c;
}

DetectionCurves curves(const Prior& prior, const std::vector<double>& lambda_grid) {
  const ReconstructionThreshold threshold = reconstruction_threshold(prior);
  if (!threshold.prior_centered) {
    throw DomainError("curves: prior is not centered, lambda_c = 0");
  }
  return curves(threshold.lambda_c, lambda_grid);
}

std::string to_csv(const DetectionCurves& c) {
  std::string out = "lambda,mu,mean_null,mean_alt,variance,err_star,kl,tv\n";
  for (std::size_t i = 0; i < c.lambda_grid.size(); ++i) {
    const double row[] = {c.lambda_grid[i], c.mu[i],       c.mean_null[i], c.mean_alt[i],
                          c.variance[i],    c.err_star[i], c.kl[i],        c.tv[i]};
    for (std::size_t k = 0; k < std::size(row); ++k) {
      if (k) out += ',';
      out += detail::format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace spiked

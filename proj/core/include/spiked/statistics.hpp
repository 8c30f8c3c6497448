#pragma once

#include <span>

namespace spiked {

struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se_mean = 0.0;
  double se_variance = 0.0;  // sqrt((m4 - s^4 (m-3)/(m-1)) / m), large-sample
  std::size_t count = 0;
};

SampleSummary summarize(std::span<const double> values);

double normal_cdf(double x, double mean = 0.0, double variance = 1.0);

/// sup_x |F_m(x) - Phi((x - mean) / sd)|.
double ks_statistic_normal(std::span<const double> values, double mean, double variance);

/// Asymptotic Kolmogorov tail P(D_m > d) with the Stephens small-sample
/// correction.
double ks_p_value(double statistic, std::size_t count);

}  // namespace spiked

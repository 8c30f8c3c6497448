#include "spiked/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spiked {

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  const double m = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / m;
  if (values.size() < 2) return s;
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = (v - s.mean) * (v - s.mean);
    m2 += d;
    m4 += d * d;
  }
  s.variance = m2 / (m - 1.0);
  s.se_mean = std::sqrt(s.variance / m);
  const double fourth = m4 / m;
  const double var_of_var = (fourth - s.variance * s.variance * (m - 3.0) / (m - 1.0)) / m;
  s.se_variance = std::sqrt(std::max(0.0, var_of_var));
  return s;
}

double normal_cdf(double x, double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("normal_cdf: variance must be > 0");
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double ks_statistic_normal(std::span<const double> values, double mean, double variance) {
  if (values.empty()) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i], mean, variance);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double ks_p_value(double statistic, std::size_t count) {
  if (count == 0) return 1.0;
  const double root = std::sqrt(static_cast<double>(count));
  const double x = (root + 0.12 + 0.11 / root) * statistic;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace spiked

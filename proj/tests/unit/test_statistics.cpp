#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spiked/statistics.hpp"

using namespace spiked;

TEST_CASE("summarize") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const SampleSummary s = summarize(v);
  CHECK(s.count == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.se_mean == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("variance standard error for normal data") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 2.0);
  std::vector<double> v(20000);
  for (double& x : v) x = z(rng);
  const SampleSummary s = summarize(v);
  // Var(s^2) = 2 sigma^4 / (m - 1) for normal samples.
  CHECK(s.se_variance == doctest::Approx(std::sqrt(2.0 * 16.0 / 19999.0)).epsilon(0.05));
  CHECK(std::abs(s.variance - 4.0) <= 4.0 * s.se_variance);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(3.0, 1.0, 4.0) == doctest::Approx(normal_cdf(1.0)));
}

TEST_CASE("kolmogorov-smirnov") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  std::vector<double> v(5000);
  for (double& x : v) x = z(rng);
  const double d = ks_statistic_normal(v, 0.0, 1.0);
  CHECK(d < 0.03);
  CHECK(ks_p_value(d, v.size()) > 0.01);
  const double shifted = ks_statistic_normal(v, 0.3, 1.0);
  CHECK(ks_p_value(shifted, v.size()) < 1e-6);
  // Critical value of the asymptotic distribution: P(sqrt(m) D > 1.358) = 0.05.
  CHECK(ks_p_value(1.358 / std::sqrt(1e6), 1000000) == doctest::Approx(0.05).epsilon(0.02));
}

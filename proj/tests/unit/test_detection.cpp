#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spiked/detection.hpp"
#include "spiked/error.hpp"
#include "spiked/prior.hpp"

using namespace spiked;

TEST_CASE("mu") {
  CHECK(mu(0.0) == 0.0);
  CHECK(mu(0.5) == doctest::Approx(0.25 * (std::numbers::ln2 - 0.5)).epsilon(1e-15));
  CHECK(mu(1.0 - 1e-9) > 4.0);
  CHECK_THROWS_AS(mu(1.0), DomainError);
  CHECK_THROWS_AS(mu(-0.1), DomainError);
}

TEST_CASE("mu with diagonal") {
  for (double lambda : {0.0, 0.2, 0.5, 0.9}) {
    CHECK(std::abs(mu_with_diagonal(rademacher(), lambda, 1e12) - mu(lambda)) <= 1e-9);
  }
  CHECK(mu_with_diagonal(rademacher(), 0.5, 1.0) == doctest::Approx(mu(0.5) + 0.25).epsilon(1e-15));

  const std::vector<double> atoms{-2.0, 1.0}, weights{1.0 / 3.0, 2.0 / 3.0};
  const Prior p = standardized(make_discrete_prior(atoms, weights), false);
  const double kappa = p.moment(3) * p.moment(3);
  const double sigma = 2.0, lambda = 0.3;
  const double expected = 0.25 * (-std::log(1 - lambda) - lambda) * (1 + kappa / (sigma * sigma)) +
                          lambda / (2 * sigma * sigma);
  CHECK(mu_with_diagonal(p, lambda, sigma) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(mu_with_diagonal(p, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(mu_with_diagonal(p, 0.5, 0.0), DomainError);
}

TEST_CASE("optimal error") {
  CHECK(optimal_error(0.0) == 1.0);
  CHECK(optimal_error(0.75) == doctest::Approx(std::erfc(0.25 * std::sqrt(std::log(4.0) - 0.75))).epsilon(1e-14));
  CHECK(optimal_error_per_type(0.4) == doctest::Approx(0.5 * optimal_error(0.4)));
  CHECK_THROWS_AS(optimal_error(1.0), DomainError);
  for (int i = 0; i < 100; ++i) {
    const double lambda = 0.0099 * i;
    const double direct = std::erfc(0.25 * std::sqrt(-std::log(1 - lambda) - lambda));
    CHECK(std::abs(optimal_error(lambda) - direct) <= 1e-12);
    CHECK(tv_limit(lambda) == 1.0 - optimal_error(lambda));
    CHECK(kl_limit(lambda) == mu(lambda));
  }
}

TEST_CASE("kl limit") {
  CHECK(kl_limit(0.0) == 0.0);
  CHECK(kl_limit(0.5) == mu(0.5));
  CHECK(std::isfinite(kl_limit(0.99)));
  CHECK(kl_limit(0.99) == mu(0.99));
}

TEST_CASE("curves") {
  const DetectionCurves c = curves(rademacher(), {0.0, 0.2, 0.4, 0.6, 0.8});
  REQUIRE(c.mu.size() == 5);
  CHECK(c.err_star[0] == 1.0);
  CHECK(c.mu[0] == 0.0);
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(c.mu[i] > c.mu[i - 1]);
    CHECK(c.err_star[i] < c.err_star[i - 1]);
    CHECK(c.tv[i] > c.tv[i - 1]);
  }
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(c.kl[i] == c.mu[i]);
    CHECK(c.mean_null[i] == -c.mu[i]);
    CHECK(c.mean_alt[i] == c.mu[i]);
    CHECK(c.variance[i] == 2 * c.mu[i]);
    CHECK(std::abs(c.err_star[i] + c.tv[i] - 1.0) <= 1e-12);
    CHECK(c.err_star[i] > 0.0);
    CHECK(c.err_star[i] <= 1.0);
  }
  CHECK(curves(rademacher(), {0.99}).tv[0] < 1.0);
  CHECK_THROWS_AS(curves(rademacher(), {0.5, 1.2}), DomainError);
  CHECK_THROWS_AS(curves(sparse_rademacher(0.05), {0.95}), DomainError);
  const std::vector<double> atoms{0.0, 1.0}, weights{0.5, 0.5};
  CHECK_THROWS_AS(curves(make_discrete_prior(atoms, weights), {0.1}), DomainError);
}

TEST_CASE("curves csv") {
  const std::string csv = to_csv(curves(1.0, {0.0, 0.5}));
  CHECK(csv.rfind("lambda,mu,mean_null,mean_alt,variance,err_star,kl,tv\n0,0,0,0,0,1,0,0\n", 0) == 0);
}

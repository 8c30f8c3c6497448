#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "spiked/error.hpp"
#include "spiked/prior.hpp"
#include "spiked/quadrature.hpp"
#include "spiked/scalar_channel.hpp"

using namespace spiked;

namespace {

// Plain Gauss-Hermite route for psi, sharing nothing with the library's
// envelope-split Legendre panels beyond the rule itself.
double psi_gauss_hermite(const Prior& p, double r, int order) {
  const QuadratureRule rule = gauss_hermite(order);
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double inner = 0.0;
    for (int q = 0; q < order; ++q) {
      double top = -INFINITY;
      std::vector<double> e(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double a = p.atoms()[k];
        e[k] = std::sqrt(r) * rule.nodes[q] * a + r * a * p.atoms()[j] - 0.5 * r * a * a +
               std::log(p.weights()[k]);
        top = std::max(top, e[k]);
      }
      double s = 0.0;
      for (double v : e) s += std::exp(v - top);
      inner += rule.weights[q] * (top + std::log(s));
    }
    total += p.weights()[j] * inner;
  }
  return total;
}

Prior random_prior(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 5);
  std::uniform_real_distribution<double> atom(-2.5, 2.5), weight(0.05, 1.0);
  std::vector<double> atoms, weights;
  const int k = count(rng);
  while (static_cast<int>(atoms.size()) < k) {
    const double a = atom(rng);
    if (std::none_of(atoms.begin(), atoms.end(), [&](double b) { return std::abs(a - b) < 0.05; })) {
      atoms.push_back(a);
      weights.push_back(weight(rng));
    }
  }
  return make_discrete_prior(atoms, weights);
}

}  // namespace

TEST_CASE("psi at r = 0 vanishes") {
  CHECK(psi(rademacher(), 0.0) == 0.0);
  CHECK(psi(sparse_rademacher(0.1), 0.0) == 0.0);
  CHECK(psi_hat(rademacher(), 0.0, 0.0) == 0.0);
}

TEST_CASE("negative r is rejected") {
  CHECK_THROWS_AS(psi(rademacher(), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(psi_hat(rademacher(), -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(psi_bar(rademacher(), -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("rademacher psi(1) = E log cosh(z + 1) - 1/2") {
  // Adaptive scipy quadrature of the reduced integrand.
  CHECK(std::abs(psi(rademacher(), 1.0) - 0.163169179653168) <= 1e-12);
  // 1e6-sample Monte Carlo oracle: 0.164118 with standard error 0.000647.
  CHECK(std::abs(psi(rademacher(), 1.0) - 0.164118) <= 3 * 0.000647);
}

TEST_CASE("sparse rademacher psi(0.5) against oracles") {
  const double v = psi(sparse_rademacher(0.05), 0.5);
  CHECK(std::abs(v - 0.083299715578716) <= 1e-11);
  // Monte Carlo over (x*, z), 1e6 samples: 0.081972, SE 0.000693.
  CHECK(std::abs(v - 0.081972) <= 3 * 0.000693);
}

TEST_CASE("psi_hat examples") {
  const Prior rad = rademacher();
  CHECK(psi_hat(rad, 1.0, 1.0) == doctest::Approx(psi(rad, 1.0)).epsilon(1e-12));
  const double v = psi_hat(sparse_rademacher(0.25), 0.3, -0.2);
  CHECK(std::abs(v - -0.000423198320790) <= 1e-12);
  // Monte Carlo over z, 1e6 samples: -0.000248, SE 0.000182.
  CHECK(std::abs(v - -0.000248) <= 3 * 0.000182);
}

TEST_CASE("psi_bar examples") {
  const Prior rad = rademacher();
  CHECK(psi_bar(rad, 1.0, -1.0) <= psi_bar(rad, 1.0, 1.0));
  const Prior sparse = sparse_rademacher(0.1);
  CHECK(psi_bar(sparse, 0.8, -0.8) <= psi_bar(sparse, 0.8, 0.8));
  CHECK(std::abs(psi_bar(sparse, 0.8, 0.8) - psi(sparse, 0.8)) <= 1e-9);
}

TEST_CASE("psi_bar(r, r) = psi(r) and psi_bar(r, -r) <= psi_bar(r, r) on random cases") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rdist(0.01, 5.0);
  for (int i = 0; i < 20; ++i) {
    const Prior p = random_prior(rng);
    const double r = rdist(rng);
    const double plus = psi_bar(p, r, r);
    CHECK(std::abs(plus - psi(p, r)) <= 1e-9);
    CHECK(psi_bar(p, r, -r) <= plus + 1e-9);
  }
}

TEST_CASE("small-r series") {
  // psi(r) = r^2/4 - r^3/6 + O(r^4) for every sparse rademacher prior.
  for (double rho : {1.0, 0.5, 0.2}) {
    const double r = 1e-3;
    CHECK(std::abs(psi(sparse_rademacher(rho), r) - (r * r / 4 - r * r * r / 6)) <= 1e-10);
  }
}

TEST_CASE("gauss-hermite second route") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    const Prior p = random_prior(rng);
    for (double r : {0.1, 0.7, 2.0}) {
      CHECK(std::abs(psi(p, r) - psi_gauss_hermite(p, r, 200)) <= 1e-7);
    }
  }
}

TEST_CASE("psi is nonnegative, nondecreasing and convex on [0, 3]") {
  for (const Prior& p : {rademacher(), sparse_rademacher(0.05), sparse_rademacher(0.3)}) {
    std::vector<double> v;
    for (int i = 0; i <= 30; ++i) v.push_back(psi(p, 0.1 * i));
    for (int i = 0; i <= 30; ++i) CHECK(v[i] >= -1e-15);
    for (int i = 1; i <= 30; ++i) CHECK(v[i] >= v[i - 1] - 1e-12);
    for (int i = 1; i < 30; ++i) CHECK(v[i + 1] - 2 * v[i] + v[i - 1] >= -1e-11);
  }
}

TEST_CASE("orders 60 and 120 agree for r <= 5 and radius <= 5") {
  ChannelOptions low, high;
  low.order = 60;
  low.adaptive = false;
  high.order = 120;
  high.adaptive = false;
  const std::vector<double> atoms{-5.0, -0.5, 1.0, 5.0}, weights{0.1, 0.4, 0.4, 0.1};
  for (const Prior& p : {rademacher(), sparse_rademacher(0.04), make_discrete_prior(atoms, weights)}) {
    for (double r : {0.2, 1.0, 2.5, 5.0}) {
      CHECK(std::abs(psi(p, r, low) - psi(p, r, high)) <= 1e-9);
    }
  }
}

TEST_CASE("expected_log_sum_exp") {
  // E log(e^z + e^-z) from adaptive scipy quadrature.
  const double slopes[] = {1.0, -1.0}, intercepts[] = {0.0, 0.0};
  const double single[] = {2.0}, shift[] = {0.7};
  CHECK(std::abs(expected_log_sum_exp(single, shift, 80) - 0.7) <= 1e-12);
  CHECK(std::abs(expected_log_sum_exp(slopes, intercepts, 80) - 1.067714388051384) <= 1e-12);
  const double with_inf[] = {0.0, -INFINITY};
  CHECK(expected_log_sum_exp(slopes, with_inf, 40) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK_THROWS_AS(expected_log_sum_exp(slopes, single, 40), std::invalid_argument);
}

TEST_CASE("derivatives at zero") {
  SUBCASE("rademacher") {
    const PsiDerivatives d = psi_derivatives_at_zero(rademacher());
    CHECK(d.d1 == 0.0);
    CHECK(d.d2 == 0.5);
    // Series oracle: psi'''(0) = -1 for every centered unit-variance
    // symmetric prior.
    CHECK(d.d3 == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(d.d3_cross_check == doctest::Approx(-1.0).epsilon(1e-3));
  }
  SUBCASE("sparse 0.5") {
    const PsiDerivatives d = psi_derivatives_at_zero(sparse_rademacher(0.5));
    CHECK(d.d1 == doctest::Approx(0.0));
    CHECK(d.d2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.d3 == doctest::Approx(-1.0).epsilon(1e-3));
  }
  SUBCASE("sparse 0.05") {
    const PsiDerivatives d = psi_derivatives_at_zero(sparse_rademacher(0.05));
    CHECK(d.d3 < 0.0);
    CHECK(d.d3 == doctest::Approx(-1.0).epsilon(1e-3));
  }
  SUBCASE("uncentered prior") {
    const std::vector<double> atoms{0.0, 1.0}, weights{0.5, 0.5};
    const PsiDerivatives d = psi_derivatives_at_zero(make_discrete_prior(atoms, weights));
    CHECK(d.d1 == doctest::Approx(0.125));
    CHECK(d.d2 == doctest::Approx(0.125));
  }
}

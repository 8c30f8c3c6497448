#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "spiked/detection.hpp"
#include "spiked/error.hpp"
#include "spiked/experiments.hpp"

using namespace spiked;

TEST_CASE("prior json forms") {
  CHECK(prior_from_json(R"("rademacher")").atoms() == rademacher().atoms());
  CHECK(prior_from_json(R"({"sparse_rademacher": 0.25})").size() == 3);
  const Prior p = prior_from_json(R"({"atoms": [-2, 1], "weights": [1, 2]})");
  CHECK(p.weights()[1] == doctest::Approx(2.0 / 3.0));
  CHECK(prior_from_json(prior_to_json(p)).atoms() == p.atoms());
  CHECK_THROWS_AS(prior_from_json(R"({"atoms": [1]})"), std::invalid_argument);
  CHECK_THROWS_AS(prior_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(prior_from_json(R"("gaussian")"), std::invalid_argument);
}

TEST_CASE("config json round trip") {
  const ExperimentConfig c = config_from_json(
      R"({"prior": {"sparse_rademacher": 0.5}, "lambda": 0.3, "n_list": [6, 8], "replicates": 10,
          "seed": 99, "lr_method": "mc", "mc_samples": 500, "sigma": 1.5, "overlap_method": "gibbs"})");
  CHECK(c.lambda == 0.3);
  CHECK(c.n_list == std::vector<std::size_t>{6, 8});
  CHECK(c.lr_method == LRMethod::mc);
  CHECK(c.overlap_method == OverlapMethod::gibbs);
  CHECK(c.sigma == 1.5);
  const ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_from_json(R"({"sigma": "inf", "n": 5})").n_list == std::vector<std::size_t>{5});
  CHECK(std::isinf(config_from_json(R"({"sigma": "inf"})").sigma));
  CHECK_THROWS_AS(config_from_json(R"({"lr_method": "bogus"})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(R"({"lambda": "x"})"), std::invalid_argument);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.n_list = {1};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n_list = {21};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.lr_method = LRMethod::mc;
  CHECK_NOTHROW(c.validate());
  c.mc_samples = 50;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  ExperimentConfig d;
  d.replicates = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("simulation is reproducible") {
  ExperimentConfig c;
  c.n_list = {6, 7};
  c.replicates = 20;
  c.seed = 3;
  const std::string a = samples_to_csv(simulate_log_lr(c));
  c.workers = 1;
  const std::string b = samples_to_csv(simulate_log_lr(c));
  CHECK(a == b);
  c.seed = 4;
  CHECK(samples_to_csv(simulate_log_lr(c)) != a);
}

TEST_CASE("clt report") {
  ExperimentConfig c;
  c.n_list = {8};
  c.replicates = 300;
  const CLTReport r = run_clt(c);
  REQUIRE(r.results.size() == 1);
  CHECK(r.samples.size() == 600);
  CHECK(r.results[0].mu == doctest::Approx(mu(0.5)));
  CHECK(std::isfinite(r.results[0].z_mean_null));
  CHECK(r.results[0].ks_null > 0.0);
  CHECK(to_csv(r.results) == to_csv(run_clt(c).results));

  c.lambda = 1.2;
  CHECK_THROWS_AS(run_clt(c), DomainError);
  c.lambda = 0.5;
  c.prior = sparse_rademacher(0.04);
  c.lambda = 0.8;
  CHECK_THROWS_AS(run_clt(c), DomainError);
}

TEST_CASE("diagonal-kept theory") {
  ExperimentConfig c;
  c.sigma = 2.0;
  CHECK(theory_mu(c) == mu_with_diagonal(c.prior, c.lambda, 2.0));
  c.sigma = kSigmaInfinity;
  CHECK(theory_mu(c) == mu(c.lambda));
}

TEST_CASE("weak signal test error is close to a coin flip") {
  ExperimentConfig c;
  c.lambda = 0.05;
  c.n_list = {10};
  c.replicates = 400;
  const TestErrorResult r = run_test_error(c).results.front();
  CHECK(r.total > 0.85);
  CHECK(r.theory_total == doctest::Approx(optimal_error(0.05)));
  CHECK(r.theory_per_type == doctest::Approx(0.5 * optimal_error(0.05)));
}

TEST_CASE("strong detection") {
  ExperimentConfig c;
  c.lambda = 4.0;
  c.n_list = {12};
  c.replicates = 100;
  const StrongDetectionResult r = run_strong_detection(c).results.front();
  CHECK(r.correct_alt > 0.8);
  CHECK(r.correct_null > 0.8);
  CHECK(r.mean_alt_rate > 0.0);
  CHECK(r.mean_null_rate < 0.0);
  c.lambda = 0.5;
  CHECK_THROWS_AS(run_strong_detection(c), DomainError);
}

TEST_CASE("overlap report") {
  ExperimentConfig c;
  c.n_list = {6, 8};
  c.replicates = 20;
  const OverlapReport r = run_overlap(c);
  REQUIRE(r.rows.size() == 2);
  for (const OverlapRow& row : r.rows) {
    CHECK(row.scaled_r1star_sq == doctest::Approx(row.n * 0.5 * row.r1star_sq));
    CHECK(row.nishimori_se > 0.0);
  }
  CHECK(to_csv(r.rows) == to_csv(run_overlap(c).rows));
}

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spiked/likelihood.hpp"
#include "spiked/observation.hpp"
#include "spiked/overlap.hpp"
#include "spiked/prior.hpp"

namespace spiked {

/// Prior from JSON text. Accepted forms:
///   {"atoms": [...], "weights": [...]}
///   {"sparse_rademacher": rho}
///   "rademacher"
Prior prior_from_json(std::string_view text);
std::string prior_to_json(const Prior& prior);

struct ExperimentConfig {
  Prior prior = rademacher();
  double lambda = 0.5;
  std::vector<std::size_t> n_list{12};
  std::size_t replicates = 2000;
  std::uint64_t seed = 1;
  LRMethod lr_method = LRMethod::exact;
  std::size_t mc_samples = 100000;
  double sigma = kSigmaInfinity;
  OverlapMethod overlap_method = OverlapMethod::exact;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::size_t workers = 0;  // 0 = SPIKED_LIMITS_THREADS / hardware

  /// Throws std::invalid_argument / DomainError on a malformed config.
  void validate() const;
};

/// Parses a JSON config; missing keys keep their defaults. "sigma" may be a
/// number or the string "inf".
ExperimentConfig config_from_json(std::string_view text);
/// Canonical JSON echo (sorted keys, shortest round-trip doubles).
std::string config_to_json(const ExperimentConfig& config);

enum class Hypothesis { null, planted };

struct LogLRSample {
  std::size_t n = 0;
  std::size_t replicate = 0;
  Hypothesis hypothesis = Hypothesis::null;
  double log_lr = 0.0;
  double std_error = 0.0;
};

/// Draws `replicates` observations under each hypothesis for every n and
/// evaluates log L(Y; config.lambda). Replicate r under hypothesis h uses
/// seed derive_seed(seed, n, 2r + h); results are in deterministic order.
std::vector<LogLRSample> simulate_log_lr(const ExperimentConfig& config);

/// Limiting mu for the configured sigma (diagonal-kept formula when finite).
double theory_mu(const ExperimentConfig& config);

struct CLTResult {
  std::size_t n = 0;
  std::size_t replicates = 0;
  double mu = 0.0;
  double mean_null = 0.0, se_mean_null = 0.0, var_null = 0.0, se_var_null = 0.0;
  double mean_alt = 0.0, se_mean_alt = 0.0, var_alt = 0.0, se_var_alt = 0.0;
  double z_mean_null = 0.0, z_mean_alt = 0.0, z_var_null = 0.0, z_var_alt = 0.0;
  double ks_null = 0.0, ks_alt = 0.0, ks_p_null = 0.0, ks_p_alt = 0.0;
  // Finite-size gates: |mean_null + mu| <= max(4 SE, 0.1 mu),
  // |var_null - 2 mu| <= 0.25 * 2 mu, |gap - 2 mu| <= 0.2 * 2 mu.
  bool mean_ok = false, variance_ok = false, gap_ok = false;
};

struct CLTReport {
  double lambda_c = 0.0;
  std::vector<LogLRSample> samples;
  std::vector<CLTResult> results;
};

/// Requires lambda < lambda_c(prior), lambda < 1 and a centered unit-variance
/// prior (DomainError otherwise).
CLTReport run_clt(const ExperimentConfig& config);

struct TestErrorResult {
  std::size_t n = 0;
  std::size_t replicates = 0;
  double type_one = 0.0;  // P_0(log L > 0)
  double type_two = 0.0;  // P_lambda(log L <= 0)
  double total = 0.0;
  double theory_total = 0.0;
  double theory_per_type = 0.0;
  bool total_ok = false;     // |total - theory_total| <= 0.05
  bool per_type_ok = false;  // both types within 0.05 of theory_per_type
};

struct TestErrorReport {
  double lambda_c = 0.0;
  std::vector<LogLRSample> samples;
  std::vector<TestErrorResult> results;
};

TestErrorReport run_test_error(const ExperimentConfig& config);

struct StrongDetectionResult {
  std::size_t n = 0;
  std::size_t replicates = 0;
  double correct_alt = 0.0;   // fraction with log L / n > 0 under P_lambda
  double correct_null = 0.0;  // fraction with log L / n <= 0 under P_0
  double mean_null_rate = 0.0;
  double mean_alt_rate = 0.0;
  bool passes_95 = false;
};

struct StrongDetectionReport {
  double lambda_c = 0.0;
  std::vector<LogLRSample> samples;
  std::vector<StrongDetectionResult> results;
};

/// Requires lambda > lambda_c(prior).
StrongDetectionReport run_strong_detection(const ExperimentConfig& config);

struct OverlapRow {
  std::size_t n = 0;
  std::size_t draws = 0;
  double r1star_sq = 0.0, se_r1star_sq = 0.0;
  double r1star_4 = 0.0, se_r1star_4 = 0.0;
  double r12_sq = 0.0, se_r12_sq = 0.0;
  double scaled_r1star_sq = 0.0;  // n (1 - lambda) E<R_{1,*}^2>
  double scaled_r1star_4 = 0.0;   // n^2 E<R_{1,*}^4>
  double nishimori_gap = 0.0;     // |E<R_{1,2}^2> - E<R_{1,*}^2>|
  double nishimori_se = 0.0;      // pooled sqrt(se_12^2 + se_1*^2)
};

struct OverlapReport {
  double lambda_c = 0.0;
  std::vector<OverlapRow> rows;
};

/// Requires lambda < lambda_c(prior). Each of `replicates` draws samples a
/// planted observation and computes posterior overlap moments.
OverlapReport run_overlap(const ExperimentConfig& config);

std::string samples_to_csv(const std::vector<LogLRSample>& samples);
std::string to_csv(const std::vector<CLTResult>& results);
std::string to_csv(const std::vector<TestErrorResult>& results);
std::string to_csv(const std::vector<StrongDetectionResult>& results);
std::string to_csv(const std::vector<OverlapRow>& rows);

}  // namespace spiked

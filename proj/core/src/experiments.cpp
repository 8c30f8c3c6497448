#include "spiked/experiments.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "format.hpp"
#include "spiked/detection.hpp"
#include "spiked/error.hpp"
#include "spiked/parallel.hpp"
#include "spiked/rs_threshold.hpp"
#include "spiked/statistics.hpp"

namespace spiked {
namespace {

using nlohmann::json;

Prior prior_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "rademacher") return rademacher();
    throw std::invalid_argument("prior: unknown named prior '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) throw std::invalid_argument("prior: expected a JSON object or name");
  if (j.contains("sparse_rademacher")) return sparse_rademacher(j.at("sparse_rademacher").get<double>());
  if (!j.contains("atoms") || !j.contains("weights")) {
    throw std::invalid_argument("prior: object needs \"atoms\" and \"weights\"");
  }
  const auto atoms = j.at("atoms").get<std::vector<double>>();
  const auto weights = j.at("weights").get<std::vector<double>>();
  return make_discrete_prior(atoms, weights);
}

double sigma_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return kSigmaInfinity;
    throw std::invalid_argument("config: sigma must be a number or \"inf\"");
  }
  return j.get<double>();
}

double require_centered_lambda_c(const Prior& prior) {
  const ReconstructionThreshold t = reconstruction_threshold(prior);
  if (!t.prior_centered) throw DomainError("prior is not centered: lambda_c = 0");
  return t.lambda_c;
}

void require_clt_regime(const ExperimentConfig& config, double lambda_c) {
  if (!config.prior.unit_variance()) {
    throw DomainError("the CLT limits assume a unit-variance prior");
  }
  if (config.lambda >= lambda_c) {
    throw DomainError("lambda = " + detail::format_double(config.lambda) +
                      " is not below lambda_c = " + detail::format_double(lambda_c));
  }
}

std::vector<double> pick(const std::vector<LogLRSample>& samples, std::size_t n, Hypothesis h) {
  std::vector<double> out;
  for (const LogLRSample& s : samples) {
    if (s.n == n && s.hypothesis == h) out.push_back(s.log_lr);
  }
  return out;
}

std::string join_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const std::string& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

std::string num(double v) { return detail::format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

}  // namespace

Prior prior_from_json(std::string_view text) {
  try {
    return prior_from(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("prior: ") + e.what());
  }
}

std::string prior_to_json(const Prior& prior) {
  json j;
  j["atoms"] = prior.atoms();
  j["weights"] = prior.weights();
  return j.dump();
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (n_list.empty()) throw std::invalid_argument("config: n_list is empty");
  for (std::size_t n : n_list) {
    if (n < 2) throw std::invalid_argument("config: every n must be >= 2");
    if (lr_method == LRMethod::exact && configuration_count(prior, n) > enumeration_cap) {
      throw DomainError("config: exact method exceeds the enumeration cap at n = " +
                        std::to_string(n));
    }
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("config: lambda must be finite and >= 0");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be > 0");
  if (lr_method == LRMethod::mc && mc_samples < 100) {
    throw std::invalid_argument("config: mc_samples must be >= 100");
  }
}

ExperimentConfig config_from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    if (j.contains("prior")) c.prior = prior_from(j.at("prior"));
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<std::size_t>>();
    if (j.contains("n")) c.n_list = {j.at("n").get<std::size_t>()};
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("lr_method")) {
      const auto m = j.at("lr_method").get<std::string>();
      if (m != "exact" && m != "mc") throw std::invalid_argument("config: lr_method must be exact|mc");
      c.lr_method = m == "exact" ? LRMethod::exact : LRMethod::mc;
    }
    if (j.contains("mc_samples")) c.mc_samples = j.at("mc_samples").get<std::size_t>();
    if (j.contains("sigma")) c.sigma = sigma_from(j.at("sigma"));
    if (j.contains("overlap_method")) {
      const auto m = j.at("overlap_method").get<std::string>();
      if (m != "exact" && m != "gibbs") {
        throw std::invalid_argument("config: overlap_method must be exact|gibbs");
      }
      c.overlap_method = m == "exact" ? OverlapMethod::exact : OverlapMethod::gibbs;
    }
    if (j.contains("enumeration_cap")) c.enumeration_cap = j.at("enumeration_cap").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["prior"] = json::parse(prior_to_json(c.prior));
  j["lambda"] = c.lambda;
  j["n_list"] = c.n_list;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["lr_method"] = to_string(c.lr_method);
  j["mc_samples"] = c.mc_samples;
  j["sigma"] = std::isfinite(c.sigma) ? json(c.sigma) : json("inf");
  j["overlap_method"] = to_string(c.overlap_method);
  j["enumeration_cap"] = c.enumeration_cap;
  return j.dump();
}

std::vector<LogLRSample> simulate_log_lr(const ExperimentConfig& config) {
  config.validate();
  const std::size_t per_n = 2 * config.replicates;
  std::vector<LogLRSample> samples(per_n * config.n_list.size());
  parallel_for(
      samples.size(),
      [&](std::size_t idx) {
        const std::size_t n = config.n_list[idx / per_n];
        const std::size_t unit = idx % per_n;
        const auto hyp = unit % 2 == 0 ? Hypothesis::null : Hypothesis::planted;
        const std::uint64_t seed = derive_seed(config.seed, n, unit);
        const double truth = hyp == Hypothesis::null ? 0.0 : config.lambda;
        const SampledObservation draw = sample_observation(config.prior, n, truth, config.sigma, seed);
        const LogLREstimate est =
            config.lr_method == LRMethod::exact
                ? log_lr_exact(draw.observation, config.lambda, config.prior, config.enumeration_cap)
                : log_lr_mc(draw.observation, config.lambda, config.prior, config.mc_samples,
                            derive_seed(seed, 0x6d63));
        samples[idx] = {n, unit / 2, hyp, est.value, est.std_error};
      },
      config.workers);
  return samples;
}

double theory_mu(const ExperimentConfig& config) {
  return std::isfinite(config.sigma) ? mu_with_diagonal(config.prior, config.lambda, config.sigma)
                                     : mu(config.lambda);
}

CLTReport run_clt(const ExperimentConfig& config) {
  config.validate();
  CLTReport report;
  report.lambda_c = require_centered_lambda_c(config.prior);
  require_clt_regime(config, report.lambda_c);
  const double m = theory_mu(config);
  report.samples = simulate_log_lr(config);
  for (std::size_t n : config.n_list) {
    const auto null = pick(report.samples, n, Hypothesis::null);
    const auto alt = pick(report.samples, n, Hypothesis::planted);
    const SampleSummary s0 = summarize(null);
    const SampleSummary s1 = summarize(alt);
    CLTResult r;
    r.n = n;
    r.replicates = config.replicates;
    r.mu = m;
    r.mean_null = s0.mean;
    r.se_mean_null = s0.se_mean;
    r.var_null = s0.variance;
    r.se_var_null = s0.se_variance;
    r.mean_alt = s1.mean;
    r.se_mean_alt = s1.se_mean;
    r.var_alt = s1.variance;
    r.se_var_alt = s1.se_variance;
    auto z = [](double value, double target, double se) {
      return se > 0.0 ? (value - target) / se : 0.0;
    };
    r.z_mean_null = z(s0.mean, -m, s0.se_mean);
    r.z_mean_alt = z(s1.mean, m, s1.se_mean);
    r.z_var_null = z(s0.variance, 2.0 * m, s0.se_variance);
    r.z_var_alt = z(s1.variance, 2.0 * m, s1.se_variance);
    if (m > 0.0) {
      r.ks_null = ks_statistic_normal(null, -m, 2.0 * m);
      r.ks_alt = ks_statistic_normal(alt, m, 2.0 * m);
      r.ks_p_null = ks_p_value(r.ks_null, null.size());
      r.ks_p_alt = ks_p_value(r.ks_alt, alt.size());
    }
    r.mean_ok = std::abs(s0.mean + m) <= std::max(4.0 * s0.se_mean, 0.1 * m);
    r.variance_ok = std::abs(s0.variance - 2.0 * m) <= 0.25 * 2.0 * m;
    r.gap_ok = std::abs((s1.mean - s0.mean) - 2.0 * m) <= 0.2 * 2.0 * m;
    report.results.push_back(r);
  }
  return report;
}

TestErrorReport run_test_error(const ExperimentConfig& config) {
  config.validate();
  TestErrorReport report;
  report.lambda_c = require_centered_lambda_c(config.prior);
  require_clt_regime(config, report.lambda_c);
  report.samples = simulate_log_lr(config);
  for (std::size_t n : config.n_list) {
    const auto null = pick(report.samples, n, Hypothesis::null);
    const auto alt = pick(report.samples, n, Hypothesis::planted);
    TestErrorResult r;
    r.n = n;
    r.replicates = config.replicates;
    std::size_t rejected = 0, missed = 0;
    for (double v : null) rejected += v > 0.0;
    for (double v : alt) missed += v <= 0.0;
    r.type_one = static_cast<double>(rejected) / static_cast<double>(null.size());
    r.type_two = static_cast<double>(missed) / static_cast<double>(alt.size());
    r.total = r.type_one + r.type_two;
    const double m = theory_mu(config);
    r.theory_total = std::erfc(0.5 * std::sqrt(m));
    r.theory_per_type = 0.5 * r.theory_total;
    r.total_ok = std::abs(r.total - r.theory_total) <= 0.05;
    r.per_type_ok = std::abs(r.type_one - r.theory_per_type) <= 0.05 &&
                    std::abs(r.type_two - r.theory_per_type) <= 0.05;
    report.results.push_back(r);
  }
  return report;
}

StrongDetectionReport run_strong_detection(const ExperimentConfig& config) {
  config.validate();
  StrongDetectionReport report;
  report.lambda_c = require_centered_lambda_c(config.prior);
  if (config.lambda <= report.lambda_c) {
    throw DomainError("strong detection needs lambda > lambda_c = " +
                      detail::format_double(report.lambda_c));
  }
  report.samples = simulate_log_lr(config);
  for (std::size_t n : config.n_list) {
    const auto null = pick(report.samples, n, Hypothesis::null);
    const auto alt = pick(report.samples, n, Hypothesis::planted);
    StrongDetectionResult r;
    r.n = n;
    r.replicates = config.replicates;
    const double nd = static_cast<double>(n);
    std::size_t good_alt = 0, good_null = 0;
    for (double v : alt) good_alt += v / nd > 0.0;
    for (double v : null) good_null += v / nd <= 0.0;
    r.correct_alt = static_cast<double>(good_alt) / static_cast<double>(alt.size());
    r.correct_null = static_cast<double>(good_null) / static_cast<double>(null.size());
    r.mean_null_rate = summarize(null).mean / nd;
    r.mean_alt_rate = summarize(alt).mean / nd;
    r.passes_95 = r.correct_alt >= 0.95 && r.correct_null >= 0.95;
    report.results.push_back(r);
  }
  return report;
}

OverlapReport run_overlap(const ExperimentConfig& config) {
  if (config.replicates < 2) throw std::invalid_argument("overlap: need at least 2 draws");
  for (std::size_t n : config.n_list) {
    if (n < 2) throw std::invalid_argument("config: every n must be >= 2");
    if (config.overlap_method == OverlapMethod::exact &&
        configuration_count(config.prior, n) > config.enumeration_cap) {
      throw DomainError("overlap: exact enumeration exceeds the cap at n = " + std::to_string(n));
    }
  }
  OverlapReport report;
  report.lambda_c = require_centered_lambda_c(config.prior);
  if (config.lambda >= report.lambda_c) {
    throw DomainError("overlap scaling needs lambda < lambda_c = " +
                      detail::format_double(report.lambda_c));
  }
  for (std::size_t n : config.n_list) {
    std::vector<OverlapStats> draws(config.replicates);
    parallel_for(
        draws.size(),
        [&](std::size_t r) {
          const std::uint64_t seed = derive_seed(config.seed, n, r);
          // Spike drawn even at lambda = 0 so the planted overlap is defined.
          std::mt19937_64 spike_rng(derive_seed(seed, 0x73));
          std::discrete_distribution<std::size_t> pick_atom(config.prior.weights().begin(),
                                                            config.prior.weights().end());
          std::vector<double> spike(n);
          for (double& x : spike) x = config.prior.atoms()[pick_atom(spike_rng)];
          const Observation obs = sample_planted(spike, config.lambda, config.sigma, seed);
          OverlapParams params;
          params.cap = config.enumeration_cap;
          params.seed = derive_seed(seed, 0x67);
          params.replica_fourth_moment = false;
          draws[r] = overlap_moments(obs, spike, config.lambda, config.prior,
                                     config.overlap_method, params);
        },
        config.workers);
    std::vector<double> a, b, c;
    for (const OverlapStats& s : draws) {
      a.push_back(s.e_r1star_sq);
      b.push_back(s.e_r1star_4);
      c.push_back(s.e_r12_sq);
    }
    const SampleSummary sa = summarize(a), sb = summarize(b), sc = summarize(c);
    OverlapRow row;
    row.n = n;
    row.draws = config.replicates;
    row.r1star_sq = sa.mean;
    row.se_r1star_sq = sa.se_mean;
    row.r1star_4 = sb.mean;
    row.se_r1star_4 = sb.se_mean;
    row.r12_sq = sc.mean;
    row.se_r12_sq = sc.se_mean;
    const double nd = static_cast<double>(n);
    row.scaled_r1star_sq = nd * (1.0 - config.lambda) * sa.mean;
    row.scaled_r1star_4 = nd * nd * sb.mean;
    row.nishimori_gap = std::abs(sc.mean - sa.mean);
    row.nishimori_se = std::hypot(sa.se_mean, sc.se_mean);
    report.rows.push_back(row);
  }
  return report;
}

std::string samples_to_csv(const std::vector<LogLRSample>& samples) {
  std::string out = "n,replicate,hypothesis,log_lr,std_error\n";
  for (const LogLRSample& s : samples) {
    out += join_row({num(s.n), num(s.replicate),
                     s.hypothesis == Hypothesis::null ? "null" : "planted", num(s.log_lr),
                     num(s.std_error)});
  }
  return out;
}

std::string to_csv(const std::vector<CLTResult>& results) {
  std::string out =
      "n,replicates,mu,mean_null,se_mean_null,var_null,mean_alt,se_mean_alt,var_alt,"
      "z_mean_null,z_mean_alt,z_var_null,z_var_alt,ks_null,ks_alt,ks_p_null,ks_p_alt,"
      "mean_ok,variance_ok,gap_ok\n";
  for (const CLTResult& r : results) {
    out += join_row({num(r.n), num(r.replicates), num(r.mu), num(r.mean_null), num(r.se_mean_null),
                     num(r.var_null), num(r.mean_alt), num(r.se_mean_alt), num(r.var_alt),
                     num(r.z_mean_null), num(r.z_mean_alt), num(r.z_var_null), num(r.z_var_alt),
                     num(r.ks_null), num(r.ks_alt), num(r.ks_p_null), num(r.ks_p_alt),
                     r.mean_ok ? "1" : "0", r.variance_ok ? "1" : "0", r.gap_ok ? "1" : "0"});
  }
  return out;
}

std::string to_csv(const std::vector<TestErrorResult>& results) {
  std::string out = "n,replicates,type_one,type_two,total,theory_total,theory_per_type,total_ok,per_type_ok\n";
  for (const TestErrorResult& r : results) {
    out += join_row({num(r.n), num(r.replicates), num(r.type_one), num(r.type_two), num(r.total),
                     num(r.theory_total), num(r.theory_per_type), r.total_ok ? "1" : "0",
                     r.per_type_ok ? "1" : "0"});
  }
  return out;
}

std::string to_csv(const std::vector<StrongDetectionResult>& results) {
  std::string out = "n,replicates,correct_alt,correct_null,mean_null_rate,mean_alt_rate,passes_95\n";
  for (const StrongDetectionResult& r : results) {
    out += join_row({num(r.n), num(r.replicates), num(r.correct_alt), num(r.correct_null),
                     num(r.mean_null_rate), num(r.mean_alt_rate), r.passes_95 ? "1" : "0"});
  }
  return out;
}

std::string to_csv(const std::vector<OverlapRow>& rows) {
  std::string out =
      "n,draws,r1star_sq,se_r1star_sq,r1star_4,se_r1star_4,r12_sq,se_r12_sq,"
      "scaled_r1star_sq,scaled_r1star_4,nishimori_gap,nishimori_se\n";
  for (const OverlapRow& r : rows) {
    out += join_row({num(r.n), num(r.draws), num(r.r1star_sq), num(r.se_r1star_sq),
                     num(r.r1star_4), num(r.se_r1star_4), num(r.r12_sq), num(r.se_r12_sq),
                     num(r.scaled_r1star_sq), num(r.scaled_r1star_4), num(r.nishimori_gap),
                     num(r.nishimori_se)});
  }
  return out;
}

}  // namespace spiked

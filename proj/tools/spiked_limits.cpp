// spiked-limits: command-line front end for the spiked Wigner experiments.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/sha.h>

#include "spiked/detection.hpp"
#include "spiked/error.hpp"
#include "spiked/experiments.hpp"
#include "spiked/likelihood.hpp"
#include "spiked/observation.hpp"
#include "spiked/rs_threshold.hpp"

namespace {

using nlohmann::json;
using namespace spiked;

enum ExitCode { kOk = 0, kFailure = 1, kDomain = 2, kConvergence = 3 };

struct Options {
  std::string config_path;
  std::string prior;
  std::optional<double> lambda;
  std::vector<std::size_t> n;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::optional<std::size_t> mc_samples;
  std::string sigma;
  std::string out;
  std::string grid;
  std::string load;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Same digest as `git hash-object`: sha1("blob <size>\0" + content).
std::string content_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned char b : digest) {
    hex += kHex[b >> 4];
    hex += kHex[b & 15];
  }
  return hex;
}

// "--prior" takes inline JSON, a bare name, or @file.
Prior parse_prior(const std::string& spec) {
  if (!spec.empty() && spec.front() == '@') return prior_from_json(read_file(spec.substr(1)));
  if (spec == "rademacher") return rademacher();
  return prior_from_json(spec);
}

double parse_sigma(const std::string& text) {
  if (text == "inf" || text == "infinity") return kSigmaInfinity;
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad --sigma value '" + text + "'");
  return v;
}

// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0)) {
      throw std::invalid_argument("bad --grid '" + text + "', expected start:stop:step");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) grid.push_back(start + i * step);
    return grid;
  }
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) grid.push_back(std::stod(item));
  if (grid.empty()) throw std::invalid_argument("empty --grid");
  return grid;
}

ExperimentConfig build_config(const Options& o, bool overlap_command) {
  ExperimentConfig c;
  if (!o.config_path.empty()) c = config_from_json(read_file(o.config_path));
  if (!o.prior.empty()) c.prior = parse_prior(o.prior);
  if (o.lambda) c.lambda = *o.lambda;
  if (!o.n.empty()) c.n_list = o.n;
  if (o.replicates) c.replicates = *o.replicates;
  if (o.seed) c.seed = *o.seed;
  if (o.mc_samples) c.mc_samples = *o.mc_samples;
  if (!o.sigma.empty()) c.sigma = parse_sigma(o.sigma);
  if (!o.method.empty()) {
    if (overlap_command) {
      if (o.method != "exact" && o.method != "gibbs") {
        throw std::invalid_argument("--method must be exact|gibbs for overlap");
      }
      c.overlap_method = o.method == "exact" ? OverlapMethod::exact : OverlapMethod::gibbs;
    } else {
      if (o.method != "exact" && o.method != "mc") throw std::invalid_argument("--method must be exact|mc");
      c.lr_method = o.method == "exact" ? LRMethod::exact : LRMethod::mc;
    }
  }
  return c;
}

void write_out(const Options& o, const std::string& csv) {
  if (o.out.empty()) return;
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << csv;
}

void emit(const std::string& command, const json& config, const json& results, const Options& o) {
  json summary;
  summary["command"] = command;
  summary["config"] = config;
  summary["input_hash"] = content_hash(config.dump());
  summary["results"] = results;
  if (!o.out.empty()) summary["out"] = o.out;
  std::cout << summary.dump(2) << '\n';
}

json finite_or_string(double v) { return std::isfinite(v) ? json(v) : json("inf"); }

void cmd_threshold(const Options& o) {
  const Prior prior = o.prior.empty() ? rademacher() : parse_prior(o.prior);
  const std::vector<double> grid = parse_grid(o.grid.empty() ? "0:2:0.05" : o.grid);
  const RSReport report = rs_report(prior, grid);
  write_out(o, to_csv(report));
  json config{{"prior", json::parse(prior_to_json(prior))}, {"grid", grid}};
  emit("threshold", config, json::parse(to_json(report)), o);
}

void cmd_curves(const Options& o) {
  const Prior prior = o.prior.empty() ? rademacher() : parse_prior(o.prior);
  const std::vector<double> grid = parse_grid(o.grid.empty() ? "0:0.95:0.05" : o.grid);
  const DetectionCurves table = curves(prior, grid);
  write_out(o, to_csv(table));
  json config{{"prior", json::parse(prior_to_json(prior))}, {"grid", grid}};
  json results{{"lambda", table.lambda_grid}, {"mu", table.mu},   {"err_star", table.err_star},
               {"kl", table.kl},              {"tv", table.tv}};
  emit("curves", config, results, o);
}

void cmd_clt(const Options& o) {
  const ExperimentConfig c = build_config(o, false);
  const CLTReport report = run_clt(c);
  write_out(o, to_csv(report.results));
  json rows = json::array();
  for (const CLTResult& r : report.results) {
    rows.push_back({{"n", r.n},
                    {"replicates", r.replicates},
                    {"mu", r.mu},
                    {"mean_null", r.mean_null},
                    {"mean_alt", r.mean_alt},
                    {"var_null", r.var_null},
                    {"var_alt", r.var_alt},
                    {"z_mean_null", r.z_mean_null},
                    {"z_mean_alt", r.z_mean_alt},
                    {"ks_null", r.ks_null},
                    {"ks_alt", r.ks_alt},
                    {"mean_ok", r.mean_ok},
                    {"variance_ok", r.variance_ok},
                    {"gap_ok", r.gap_ok}});
  }
  emit("clt", json::parse(config_to_json(c)), {{"lambda_c", report.lambda_c}, {"rows", rows}}, o);
}

void cmd_test_error(const Options& o) {
  const ExperimentConfig c = build_config(o, false);
  const TestErrorReport report = run_test_error(c);
  write_out(o, to_csv(report.results));
  json rows = json::array();
  for (const TestErrorResult& r : report.results) {
    rows.push_back({{"n", r.n},
                    {"replicates", r.replicates},
                    {"type_one", r.type_one},
                    {"type_two", r.type_two},
                    {"total", r.total},
                    {"theory_total", r.theory_total},
                    {"theory_per_type", r.theory_per_type},
                    {"total_ok", r.total_ok},
                    {"per_type_ok", r.per_type_ok}});
  }
  emit("test-error", json::parse(config_to_json(c)), {{"lambda_c", report.lambda_c}, {"rows", rows}},
       o);
}

void cmd_strong_detection(const Options& o) {
  const ExperimentConfig c = build_config(o, false);
  const StrongDetectionReport report = run_strong_detection(c);
  write_out(o, to_csv(report.results));
  json rows = json::array();
  for (const StrongDetectionResult& r : report.results) {
    rows.push_back({{"n", r.n},
                    {"replicates", r.replicates},
                    {"correct_alt", r.correct_alt},
                    {"correct_null", r.correct_null},
                    {"mean_null_rate", r.mean_null_rate},
                    {"mean_alt_rate", r.mean_alt_rate},
                    {"passes_95", r.passes_95}});
  }
  emit("strong-detection", json::parse(config_to_json(c)),
       {{"lambda_c", report.lambda_c}, {"rows", rows}}, o);
}

void cmd_overlap(const Options& o) {
  const ExperimentConfig c = build_config(o, true);
  const OverlapReport report = run_overlap(c);
  write_out(o, to_csv(report.rows));
  json rows = json::array();
  for (const OverlapRow& r : report.rows) {
    rows.push_back({{"n", r.n},
                    {"draws", r.draws},
                    {"scaled_r1star_sq", r.scaled_r1star_sq},
                    {"scaled_r1star_4", r.scaled_r1star_4},
                    {"nishimori_gap", r.nishimori_gap},
                    {"nishimori_se", r.nishimori_se}});
  }
  emit("overlap", json::parse(config_to_json(c)), {{"lambda_c", report.lambda_c}, {"rows", rows}}, o);
}

// Without --load: draw one observation and write it to --out.
// With --load: evaluate log L and the top eigenvalue of a stored observation.
void cmd_simulate(const Options& o) {
  const ExperimentConfig c = build_config(o, false);
  if (o.load.empty()) {
    if (o.out.empty()) throw std::invalid_argument("simulate needs --out (or --load)");
    const SampledObservation draw =
        sample_observation(c.prior, c.n_list.front(), c.lambda, c.sigma, c.seed);
    write_observation(draw.observation, o.out);
    json results{{"n", draw.observation.n},
                 {"sigma", finite_or_string(draw.observation.sigma)},
                 {"lambda_true", draw.observation.lambda_true},
                 {"file_hash", content_hash(read_file(o.out))}};
    if (draw.spike) results["spike"] = *draw.spike;
    emit("simulate", json::parse(config_to_json(c)), results, o);
    return;
  }
  const Observation obs = read_observation(o.load);
  const double lambda = o.lambda ? *o.lambda : obs.lambda_true;
  const LogLREstimate est = c.lr_method == LRMethod::exact
                                ? log_lr_exact(obs, lambda, c.prior, c.enumeration_cap)
                                : log_lr_mc(obs, lambda, c.prior, c.mc_samples, c.seed);
  json config = json::parse(config_to_json(c));
  config["load"] = o.load;
  config["load_hash"] = content_hash(read_file(o.load));
  json results{{"n", obs.n},
               {"sigma", finite_or_string(obs.sigma)},
               {"lambda_true", obs.lambda_true},
               {"seed", obs.seed},
               {"lambda", lambda},
               {"log_lr", est.value},
               {"method", to_string(est.method)},
               {"std_error", est.std_error},
               {"top_eigenvalue", top_eigenvalue(obs)}};
  emit("simulate", config, results, o);
}

constexpr const char* kFooter = R"(Finite-size tolerances (the limits are N -> infinity laws, desk scale is N <= 14):
  clt               |mean_null + mu| <= max(4 SE, 0.1 mu); Var under H0 within 25% of 2 mu;
                    mean_alt - mean_null within 20% of 2 mu.
  test-error        total LR-test error within +-0.05 of erfc(sqrt(mu)/2); each error type
                    within +-0.05 of erfc(sqrt(mu)/2)/2.
  strong-detection  correct sign of log L / n in >= 95% of replicates under each hypothesis.
  overlap           n(1-lambda)E<R_{1,*}^2> in [0.85, 1.15]; n^2 E<R_{1,*}^4> stable across n;
                    |E<R_{1,2}^2> - E<R_{1,*}^2>| <= 3 pooled SE.
  threshold         lambda_c by bisection to width 1e-5; q* > 1e-6 counts as nonzero.
Priors: --prior rademacher | '{"sparse_rademacher": 0.05}' | '{"atoms":[..],"weights":[..]}' | @file.json
Exit codes: 0 ok, 2 domain error or bad input, 3 solver/convergence failure, 1 other.
SPIKED_LIMITS_THREADS caps the worker pool.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection and estimation limits of the rank-one spiked Wigner model", "spiked-limits"};
  app.footer(kFooter);
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file; flags override its keys");
    sub->add_option("--prior", o.prior, "prior spec (JSON, name or @file)");
    sub->add_option("--lambda", o.lambda, "signal-to-noise ratio");
    sub->add_option("--n", o.n, "matrix size(s)")->delimiter(',');
    sub->add_option("--replicates", o.replicates, "replicates per hypothesis and n");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--method", o.method, "exact|mc for log L, exact|gibbs for overlap");
    sub->add_option("--mc-samples", o.mc_samples, "prior draws for the MC estimate of L");
    sub->add_option("--sigma", o.sigma, "diagonal noise level, or inf to drop the diagonal");
    sub->add_option("--out", o.out, "CSV output path (binary observation for simulate)");
  };

  CLI::App* threshold = app.add_subcommand("threshold", "q*, phi_RS on a grid, lambda_c and the spectral threshold");
  threshold->add_option("--prior", o.prior, "prior spec (JSON, name or @file)");
  threshold->add_option("--grid", o.grid, "lambda grid, start:stop:step or a,b,c (default 0:2:0.05)");
  threshold->add_option("--out", o.out, "CSV output path");
  CLI::App* curves_cmd = app.add_subcommand("curves", "mu, err*, KL and TV limits on a lambda grid below lambda_c");
  curves_cmd->add_option("--prior", o.prior, "prior spec (JSON, name or @file)");
  curves_cmd->add_option("--grid", o.grid, "lambda grid (default 0:0.95:0.05)");
  curves_cmd->add_option("--out", o.out, "CSV output path");
  CLI::App* clt = app.add_subcommand("clt", "empirical law of log L under both hypotheses vs N(+-mu, 2 mu)");
  CLI::App* test_error = app.add_subcommand("test-error", "empirical error of the LR test vs erfc(sqrt(mu)/2)");
  CLI::App* strong = app.add_subcommand("strong-detection", "sign of log L / n above lambda_c");
  CLI::App* overlap = app.add_subcommand("overlap", "posterior overlap moments across n");
  CLI::App* simulate = app.add_subcommand("simulate", "write one observation, or evaluate a stored one with --load");
  for (CLI::App* sub : {clt, test_error, strong, overlap, simulate}) add_common(sub);
  simulate->add_option("--load", o.load, "binary observation to evaluate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDomain;
  }

  try {
    if (*threshold) cmd_threshold(o);
    else if (*curves_cmd) cmd_curves(o);
    else if (*clt) cmd_clt(o);
    else if (*test_error) cmd_test_error(o);
    else if (*strong) cmd_strong_detection(o);
    else if (*overlap) cmd_overlap(o);
    else if (*simulate) cmd_simulate(o);
  } catch (const ConvergenceError& e) {
    std::cerr << "spiked-limits: convergence failure: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::domain_error& e) {
    std::cerr << "spiked-limits: domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spiked-limits: invalid input: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "spiked-limits: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

#include "spiked/rs_threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "format.hpp"
#include "spiked/error.hpp"
#include "spiked/parallel.hpp"

namespace spiked {
namespace {

constexpr double kGridFraction = 1e-3;
constexpr double kIntervalMargin = 1.1;
constexpr double kGoldenTolerance = 1e-8;
constexpr double kTieTolerance = 1e-9;
// Rounding noise of psi near r = 0 is ~1e-17; a maximizer inside the first
// grid cell must beat F(lambda, 0) by more than this to count as nonzero.
constexpr double kNoiseFloor = 1e-15;

struct Candidate {
  double q;
  double value;
};

Candidate golden_maximize(const auto& f, double lo, double hi) {
  const double inv_phi = std::numbers::phi - 1.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Candidate best = fc >= fd ? Candidate{c, fc} : Candidate{d, fd};
  for (double end : {lo, hi}) {
    const double fe = f(end);
    if (fe > best.value) best = {end, fe};
  }
  return best;
}

}  // namespace

double rs_potential(const Prior& prior, double lambda, double q, const ChannelOptions& options) {
  if (!(lambda >= 0.0) || !(q >= 0.0)) {
    throw std::invalid_argument("rs_potential: lambda and q must be >= 0");
  }
  return psi(prior, lambda * q, options) - 0.25 * lambda * q * q;
}

RSMaximum maximize_rs(const Prior& prior, double lambda, const ChannelOptions& options) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("maximize_rs: lambda must be >= 0");
  const double m2 = prior.second_moment();
  if (lambda == 0.0 || m2 <= 0.0) {
    // F(0, .) is identically zero; report the lambda -> 0 limit E[X]^2.
    const double m1 = prior.mean();
    return {lambda == 0.0 ? m1 * m1 : 0.0, 0.0};
  }

  auto f = [&](double q) { return rs_potential(prior, lambda, q, options); };
  const double step = kGridFraction * m2;
  const double q_max = kIntervalMargin * m2;
  const auto cells = static_cast<std::size_t>(std::llround(q_max / step));
  std::vector<double> grid(cells + 1), values(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    grid[i] = std::min(q_max, i * step);
    values[i] = f(grid[i]);
  }

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i <= cells; ++i) {
    const bool left_ok = i == 0 || values[i] > values[i - 1];
    const bool right_ok = i == cells || values[i] >= values[i + 1];
    if (!left_ok || !right_ok) continue;
    const double lo = i == 0 ? grid[0] : grid[i - 1];
    const double hi = i == cells ? grid[cells] : grid[i + 1];
    Candidate refined = golden_maximize(f, lo, hi);
    if (values[i] > refined.value) refined = {grid[i], values[i]};
    if (refined.q < step && refined.value <= values[0] + kNoiseFloor) refined = {0.0, values[0]};
    candidates.push_back(refined);
  }
  if (candidates.empty()) throw ConvergenceError("maximize_rs: no grid maximum found");

  double best_value = candidates.front().value;
  for (const Candidate& c : candidates) best_value = std::max(best_value, c.value);
  Candidate chosen{-1.0, best_value};
  for (const Candidate& c : candidates) {
    if (c.value >= best_value - kTieTolerance && c.q > chosen.q) chosen = c;
  }
  return {chosen.q, std::max(0.0, chosen.value)};
}

double spectral_threshold(const Prior& prior) {
  const double m2 = prior.second_moment();
  if (m2 <= 0.0) throw DomainError("spectral_threshold: prior has zero second moment");
  return 1.0 / (m2 * m2);
}

ReconstructionThreshold reconstruction_threshold(const Prior& prior, double q_tol) {
  if (!prior.centered()) return {0.0, false};
  const double spectral = spectral_threshold(prior);
  auto above = [&](double lambda) { return maximize_rs(prior, lambda).q_star > q_tol; };

  double lo = 0.0;
  double hi = 4.0 * spectral;
  if (!above(hi)) {
    throw ConvergenceError("reconstruction_threshold: q* still zero at 4x spectral threshold");
  }
  const double width = 1e-5 * std::min(1.0, spectral);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? hi : lo) = mid;
  }
  return {0.5 * (lo + hi), true};
}

double rho_star(double tol, double q_tol) {
  // Below rho* a second maximum of F(1, .) overtakes q = 0, so lambda_c < 1.
  auto gap_regime = [&](double rho) {
    return maximize_rs(sparse_rademacher(rho), 1.0).q_star > q_tol;
  };
  double lo = 0.02;
  double hi = 0.5;
  if (!gap_regime(lo) || gap_regime(hi)) {
    throw ConvergenceError("rho_star: bracket [0.02, 0.5] does not straddle the transition");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (gap_regime(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RSReport rs_report(const Prior& prior, const std::vector<double>& lambda_grid) {
  RSReport report;
  report.lambda_grid = lambda_grid;
  report.q_star.assign(lambda_grid.size(), 0.0);
  report.phi_rs.assign(lambda_grid.size(), 0.0);
  report.spectral_threshold = spectral_threshold(prior);
  const ReconstructionThreshold threshold = reconstruction_threshold(prior);
  report.lambda_c = threshold.lambda_c;
  report.prior_centered = threshold.prior_centered;
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    const RSMaximum m = maximize_rs(prior, lambda_grid[i]);
    report.q_star[i] = m.q_star;
    report.phi_rs[i] = m.phi_rs;
  });
  return report;
}

std::string to_csv(const RSReport& report) {
  std::string out = "lambda,q_star,phi_rs\n";
  for (std::size_t i = 0; i < report.lambda_grid.size(); ++i) {
    out += detail::format_double(report.lambda_grid[i]) + ',' +
           detail::format_double(report.q_star[i]) + ',' + detail::format_double(report.phi_rs[i]) +
           '\n';
  }
  return out;
}

std::string to_json(const RSReport& report) {
  nlohmann::ordered_json j;
  j["lambda_c"] = report.lambda_c;
  j["spectral_threshold"] = report.spectral_threshold;
  j["prior_centered"] = report.prior_centered;
  j["lambda"] = report.lambda_grid;
  j["q_star"] = report.q_star;
  j["phi_rs"] = report.phi_rs;
  return j.dump(2);
}

}  // namespace spiked

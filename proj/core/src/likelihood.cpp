#include "spiked/likelihood.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "enumerate.hpp"
#include "spiked/error.hpp"

namespace spiked {

const char* to_string(LRMethod method) noexcept {
  return method == LRMethod::exact ? "exact" : "mc";
}

std::uint64_t configuration_count(const Prior& prior, std::size_t n) {
  return detail::saturating_power(detail::positive_support(prior).atoms.size(), n);
}

LogLREstimate log_lr_exact(const Observation& obs, double lambda, const Prior& prior,
                           std::uint64_t cap) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("log_lr_exact: lambda must be >= 0");
  const detail::Support support = detail::positive_support(prior);
  const std::uint64_t count = detail::saturating_power(support.atoms.size(), obs.n);
  if (count > cap) {
    throw DomainError("log_lr_exact: " + std::to_string(support.atoms.size()) + "^" +
                      std::to_string(obs.n) + " configurations exceed the enumeration cap " +
                      std::to_string(cap));
  }
  LogLREstimate out;
  out.method = LRMethod::exact;
  out.m_samples = static_cast<std::size_t>(count);
  if (lambda == 0.0) return out;

  detail::LogSumExp acc;
  detail::ConfigurationWalker walker(obs, lambda, support);
  walker.run([&](std::span<const double>, double log_weight) { acc.add(log_weight); });
  out.value = acc.value();
  return out;
}

LogLREstimate log_lr_mc(const Observation& obs, double lambda, const Prior& prior, std::size_t m,
                        std::uint64_t seed) {
  if (m < 100) throw std::invalid_argument("log_lr_mc: need at least 100 samples");
  if (!(lambda >= 0.0)) throw std::invalid_argument("log_lr_mc: lambda must be >= 0");
  LogLREstimate out;
  out.method = LRMethod::mc;
  out.m_samples = m;
  if (lambda == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(prior.weights().begin(), prior.weights().end());
  std::vector<double> x(obs.n);
  // Running max with first and second moments of exp(v - max).
  double top = -std::numeric_limits<double>::infinity();
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (double& xi : x) xi = prior.atoms()[pick(rng)];
    const double v = hamiltonian(obs, x, lambda);
    if (v <= top) {
      const double e = std::exp(v - top);
      s1 += e;
      s2 += e * e;
    } else {
      const double r = std::exp(top - v);
      s1 = s1 * r + 1.0;
      s2 = s2 * r * r + 1.0;
      top = v;
    }
  }
  if (!(s1 > 0.0)) throw std::logic_error("log_lr_mc: all importance weights vanished");
  const double md = static_cast<double>(m);
  const double mean = s1 / md;
  const double var = std::max(0.0, (s2 - md * mean * mean) / (md - 1.0));
  out.value = top + std::log(mean);
  out.std_error = std::sqrt(var / md) / mean;
  return out;
}

}  // namespace spiked

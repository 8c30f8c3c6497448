#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "spiked/observation.hpp"
#include "spiked/prior.hpp"

namespace spiked::detail {

// Support of the prior restricted to atoms with positive weight.
struct Support {
  std::vector<double> atoms;
  std::vector<double> log_weights;
};

inline Support positive_support(const Prior& prior) {
  Support s;
  for (std::size_t k = 0; k < prior.size(); ++k) {
    if (prior.weights()[k] <= 0.0) continue;
    s.atoms.push_back(prior.atoms()[k]);
    s.log_weights.push_back(std::log(prior.weights()[k]));
  }
  return s;
}

// Walks every configuration of {atoms}^n in reflected mixed-radix Gray-code
// order (Knuth's loopless Algorithm H) and hands visit(x, log_weight) the
// exponent -H(x) + sum_i log p(x_i). Each step changes one coordinate, so the
// local fields h_i = sum_{j != i} Y_ij x_j and sum_j x_j^2 are updated in O(n).
class ConfigurationWalker {
 public:
  ConfigurationWalker(const Observation& obs, double lambda, const Support& support)
      : obs_(obs), support_(support), n_(obs.n), lambda_(lambda) {
    const double n = static_cast<double>(n_);
    scale_ = std::sqrt(lambda / n);
    penalty_ = lambda / (2.0 * n);
    inv_s2_ = obs.diag ? 1.0 / (obs.sigma * obs.sigma) : 0.0;
  }

  template <class Visit>
  void run(Visit&& visit) {
    const std::size_t radix = support_.atoms.size();
    digits_.assign(n_, 0);
    x_.assign(n_, support_.atoms[0]);
    resync();
    visit(std::span<const double>(x_), log_weight_);
    if (radix == 1) return;

    std::vector<std::size_t> focus(n_ + 1);
    std::vector<int> direction(n_, 1);
    for (std::size_t j = 0; j <= n_; ++j) focus[j] = j;
    std::uint64_t steps = 0;
    for (;;) {
      const std::size_t j = focus[0];
      focus[0] = 0;
      if (j == n_) break;
      const std::size_t from = digits_[j];
      const std::size_t to = static_cast<std::size_t>(static_cast<long>(from) + direction[j]);
      digits_[j] = to;
      if (to == 0 || to == radix - 1) {
        direction[j] = -direction[j];
        focus[j] = focus[j + 1];
        focus[j + 1] = j + 1;
      }
      change(j, from, to);
      if ((++steps & kResyncMask) == 0) resync();
      visit(std::span<const double>(x_), log_weight_);
    }
  }

 private:
  static constexpr std::uint64_t kResyncMask = (1u << 12) - 1;

  double coupling(std::size_t i, std::size_t j) const {
    return i < j ? obs_.at(i, j) : obs_.at(j, i);
  }

  void change(std::size_t k, std::size_t from, std::size_t to) {
    const double u = support_.atoms[from];
    const double v = support_.atoms[to];
    const double delta = v - u;
    const double dsq = v * v - u * u;
    log_weight_ += scale_ * delta * field_[k] - penalty_ * dsq * (sum_sq_ - u * u);
    if (obs_.diag) {
      log_weight_ +=
          inv_s2_ * (scale_ * (*obs_.diag)[k] * dsq - penalty_ * (v * v * v * v - u * u * u * u));
    }
    log_weight_ += support_.log_weights[to] - support_.log_weights[from];
    for (std::size_t i = 0; i < n_; ++i) {
      if (i != k) field_[i] += coupling(i, k) * delta;
    }
    sum_sq_ += dsq;
    x_[k] = v;
  }

  // Recomputes all incremental state from scratch to stop rounding drift.
  void resync() {
    field_.assign(n_, 0.0);
    sum_sq_ = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      sum_sq_ += x_[i] * x_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) field_[i] += coupling(i, j) * x_[j];
      }
    }
    log_weight_ = hamiltonian(obs_, x_, lambda_);
    for (std::size_t i = 0; i < n_; ++i) log_weight_ += support_.log_weights[digits_[i]];
  }

  const Observation& obs_;
  const Support& support_;
  std::size_t n_;
  double lambda_;
  double scale_ = 0.0;
  double penalty_ = 0.0;
  double inv_s2_ = 0.0;
  std::vector<std::size_t> digits_;
  std::vector<double> x_;
  std::vector<double> field_;
  double sum_sq_ = 0.0;
  double log_weight_ = 0.0;
};

// radix^n, saturating at UINT64_MAX.
inline std::uint64_t saturating_power(std::size_t radix, std::size_t n) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (radix != 0 && count > kMax / radix) return kMax;
    count *= radix;
  }
  return count;
}

// Streaming log-sum-exp accumulator.
struct LogSumExp {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return;
    if (v <= max) {
      sum += std::exp(v - max);
    } else {
      sum = sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }
  double value() const { return max + std::log(sum); }
};

}  // namespace spiked::detail

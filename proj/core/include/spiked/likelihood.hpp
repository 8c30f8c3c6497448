#pragma once

#include <cstdint>

#include "spiked/observation.hpp"
#include "spiked/prior.hpp"

namespace spiked {

enum class LRMethod { exact, mc };

const char* to_string(LRMethod method) noexcept;

struct LogLREstimate {
  double value = 0.0;  // natural log of L(Y; lambda)
  LRMethod method = LRMethod::exact;
  double std_error = 0.0;  // 0 for exact enumeration
  std::size_t m_samples = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// Number of prior configurations |support|^n, saturating at UINT64_MAX.
std::uint64_t configuration_count(const Prior& prior, std::size_t n);

/// log L(Y; lambda) = log sum_x prod_i p(x_i) exp(-H(x)) by exhaustive
/// enumeration in reflected mixed-radix Gray-code order (one coordinate
/// changes per step, O(n) update). Throws DomainError above `cap`
/// configurations.
LogLREstimate log_lr_exact(const Observation& obs, double lambda, const Prior& prior,
                           std::uint64_t cap = kDefaultEnumerationCap);

/// log of the mean of exp(-H(x^(j))) over m i.i.d. prior draws, accumulated
/// with a streaming log-sum-exp. std_error is the delta-method standard
/// error of the log of the sample mean. Requires m >= 100.
LogLREstimate log_lr_mc(const Observation& obs, double lambda, const Prior& prior, std::size_t m,
                        std::uint64_t seed);

}  // namespace spiked

#pragma once

#include <span>
#include <string>
#include <vector>

namespace spiked {

/// Finite discrete spike prior sum_k p_k delta_{a_k} on a bounded support.
///
/// Weights are renormalized once at construction. The object is immutable
/// afterwards and can be shared freely between threads.
class Prior {
 public:
  static constexpr double kNormalizationTolerance = 1e-12;

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double support_radius() const noexcept { return support_radius_; }
  bool centered() const noexcept { return centered_; }
  bool unit_variance() const noexcept { return unit_variance_; }

  /// Exact E[X^k] = sum_k p_k a_k^k. moment(0) == 1.
  double moment(int k) const;

  double mean() const { return moment(1); }
  double second_moment() const { return moment(2); }

 private:
  friend Prior make_discrete_prior(std::span<const double>, std::span<const double>);

  Prior() = default;

  std::vector<double> atoms_;
  std::vector<double> weights_;
  double support_radius_ = 0.0;
  bool centered_ = false;
  bool unit_variance_ = false;
};

/// Throws std::invalid_argument on empty or mismatched lists, a negative
/// weight, zero total mass, duplicate or non-finite atoms.
Prior make_discrete_prior(std::span<const double> atoms, std::span<const double> weights);

/// {-1, +1} with probability 1/2 each.
Prior rademacher();

/// (rho/2) delta_{-1/sqrt(rho)} + (1 - rho) delta_0 + (rho/2) delta_{+1/sqrt(rho)}.
/// Centered with unit variance for every rho in (0, 1]; rho == 1 drops the
/// zero atom.
Prior sparse_rademacher(double rho);

/// Same atoms scaled so that E[X^2] == 1 (after centering if requested).
Prior standardized(const Prior& prior, bool center);

}  // namespace spiked

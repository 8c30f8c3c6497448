#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "spiked/prior.hpp"

namespace spiked {

inline constexpr double kSigmaInfinity = std::numeric_limits<double>::infinity();

/// Upper-triangular view of Y = sqrt(lambda / n) x* x*^T + W.
///
/// Off-diagonal entries Y_ij, i < j, are stored row-major. Diagonal entries
/// are present iff sigma is finite; sigma = +inf is the "diagonal discarded"
/// convention.
struct Observation {
  std::size_t n = 0;
  std::vector<double> upper;
  std::optional<std::vector<double>> diag;
  double sigma = kSigmaInfinity;
  double lambda_true = 0.0;
  std::uint64_t seed = 0;

  bool has_diagonal() const noexcept { return diag.has_value(); }

  /// Flat index of (i, j), i < j.
  static std::size_t upper_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }
  double at(std::size_t i, std::size_t j) const { return upper[upper_index(n, i, j)]; }
};

struct SampledObservation {
  Observation observation;
  std::optional<std::vector<double>> spike;  // none for lambda == 0
};

/// Draws x* i.i.d. from the prior (only when lambda > 0) and the Gaussian
/// noise, deterministically from `seed`. Throws std::invalid_argument for
/// n < 2, lambda < 0 or sigma <= 0.
SampledObservation sample_observation(const Prior& prior, std::size_t n, double lambda,
                                      double sigma, std::uint64_t seed);

/// Draws an observation from the planted model with a caller-supplied spike.
Observation sample_planted(std::span<const double> spike, double lambda, double sigma,
                           std::uint64_t seed);

/// Exponent -H(x) of the posterior Gibbs measure:
///   sum_{i<j} sqrt(lambda / n) Y_ij x_i x_j - (lambda / 2n) x_i^2 x_j^2
/// plus, when the diagonal is present,
///   (1 / sigma^2) sum_i sqrt(lambda / n) Y_ii x_i^2 - (lambda / 2n) x_i^4.
double hamiltonian(const Observation& obs, std::span<const double> x, double lambda);

/// Largest eigenvalue of the symmetric matrix Y / sqrt(n) (diagonal taken as
/// zero when discarded). Diagnostic only; materializes the n x n matrix.
double top_eigenvalue(const Observation& obs);

/// Binary layout, little-endian:
///   u64 n | f64 sigma (+inf when the diagonal is discarded) | f64 lambda_true |
///   u64 seed | f64 upper[n(n-1)/2] | f64 diag[n] (only if sigma is finite)
void write_observation(const Observation& obs, const std::filesystem::path& path);
Observation read_observation(const std::filesystem::path& path);

}  // namespace spiked

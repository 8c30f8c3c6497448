#pragma once

#include <cstdint>
#include <span>

#include "spiked/likelihood.hpp"
#include "spiked/observation.hpp"
#include "spiked/prior.hpp"

namespace spiked {

enum class OverlapMethod { exact, gibbs };

const char* to_string(OverlapMethod method) noexcept;

struct OverlapParams {
  std::uint64_t cap = kDefaultEnumerationCap;
  std::size_t burn_in = 1000;
  std::size_t sweeps = 10000;
  std::size_t thin = 10;
  std::size_t batches = 20;
  std::uint64_t seed = 0;
  // The exact fourth replica moment needs an O(n^4 / 24) tensor per
  // configuration; callers that only need second moments can skip it.
  bool replica_fourth_moment = true;
};

/// Posterior (Gibbs) averages of overlap powers for one observation:
/// R_{1,*} = x . x* / n between a posterior draw and the spike, R_{1,2}
/// between two independent posterior draws. Standard errors are zero for
/// the exact method and batch-means estimates for the Gibbs sampler.
struct OverlapStats {
  double e_r1star_sq = 0.0;
  double e_r1star_4 = 0.0;
  double e_r12_sq = 0.0;
  double e_r12_4 = 0.0;
  double se_r1star_sq = 0.0;
  double se_r1star_4 = 0.0;
  double se_r12_sq = 0.0;
  double se_r12_4 = 0.0;
  OverlapMethod method = OverlapMethod::exact;
  std::size_t n = 0;
};

/// Exact: weighted sums over all configurations (two passes, the first for
/// log Z). Gibbs: two independent single-site heat-bath chains with burn-in,
/// thinning and a split-chain check on <R_{1,*}^2> (ConvergenceError when
/// the halves differ by more than 3 pooled standard errors).
OverlapStats overlap_moments(const Observation& obs, std::span<const double> spike, double lambda,
                             const Prior& prior, OverlapMethod method,
                             const OverlapParams& params = {});

}  // namespace spiked

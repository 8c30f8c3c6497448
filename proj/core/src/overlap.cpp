#include "spiked/overlap.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "enumerate.hpp"
#include "spiked/error.hpp"
#include "spiked/parallel.hpp"

namespace spiked {

const char* to_string(OverlapMethod method) noexcept {
  return method == OverlapMethod::exact ? "exact" : "gibbs";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Index pairs (i <= j) and quadruples (i <= j <= k <= l) with the number of
// ordered index tuples each one stands for.
struct SymmetricIndex {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> pair_mult;
  std::vector<std::pair<std::size_t, std::size_t>> quads;  // as (pair, pair)
  std::vector<double> quad_mult;

  SymmetricIndex(std::size_t n, bool with_quads) {
    std::vector<std::vector<std::size_t>> pair_id(n, std::vector<std::size_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        pair_id[i][j] = pairs.size();
        pairs.emplace_back(i, j);
        pair_mult.push_back(i == j ? 1.0 : 2.0);
      }
    }
    if (!with_quads) return;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
          for (std::size_t l = k; l < n; ++l) {
            quads.emplace_back(pair_id[i][j], pair_id[k][l]);
            const std::size_t idx[4] = {i, j, k, l};
            double mult = 24.0;
            std::size_t run = 1;
            for (int t = 1; t <= 4; ++t) {
              if (t < 4 && idx[t] == idx[t - 1]) {
                ++run;
              } else {
                for (std::size_t f = 2; f <= run; ++f) mult /= static_cast<double>(f);
                run = 1;
              }
            }
            quad_mult.push_back(mult);
          }
        }
      }
    }
  }
};

OverlapStats exact_overlaps(const Observation& obs, std::span<const double> spike, double lambda,
                            const Prior& prior, const OverlapParams& params) {
  const detail::Support support = detail::positive_support(prior);
  const std::uint64_t count = detail::saturating_power(support.atoms.size(), obs.n);
  if (count > params.cap) {
    throw DomainError("overlap_moments: " + std::to_string(count) +
                      " configurations exceed the enumeration cap");
  }
  const std::size_t n = obs.n;
  const double nd = static_cast<double>(n);

  detail::LogSumExp log_z;
  detail::ConfigurationWalker(obs, lambda, support).run([&](auto, double lw) { log_z.add(lw); });
  const double log_norm = log_z.value();

  const SymmetricIndex index(n, params.replica_fourth_moment);
  std::vector<double> pair_acc(index.pairs.size(), 0.0);
  std::vector<double> quad_acc(index.quads.size(), 0.0);
  std::vector<double> products(index.pairs.size());
  double r2 = 0.0, r4 = 0.0;
  detail::ConfigurationWalker(obs, lambda, support).run([&](std::span<const double> x, double lw) {
    const double w = std::exp(lw - log_norm);
    const double r = dot(x, spike) / nd;
    const double rr = r * r;
    r2 += w * rr;
    r4 += w * rr * rr;
    for (std::size_t p = 0; p < index.pairs.size(); ++p) {
      products[p] = x[index.pairs[p].first] * x[index.pairs[p].second];
      pair_acc[p] += w * products[p];
    }
    for (std::size_t q = 0; q < index.quads.size(); ++q) {
      quad_acc[q] += w * products[index.quads[q].first] * products[index.quads[q].second];
    }
  });

  OverlapStats stats;
  stats.method = OverlapMethod::exact;
  stats.n = n;
  stats.e_r1star_sq = r2;
  stats.e_r1star_4 = r4;
  double m2 = 0.0;
  for (std::size_t p = 0; p < pair_acc.size(); ++p) m2 += index.pair_mult[p] * pair_acc[p] * pair_acc[p];
  stats.e_r12_sq = m2 / (nd * nd);
  if (params.replica_fourth_moment) {
    double m4 = 0.0;
    for (std::size_t q = 0; q < quad_acc.size(); ++q) m4 += index.quad_mult[q] * quad_acc[q] * quad_acc[q];
    stats.e_r12_4 = m4 / (nd * nd * nd * nd);
  } else {
    stats.e_r12_4 = std::numeric_limits<double>::quiet_NaN();
  }
  return stats;
}

// Single-site heat-bath chain; the conditional of x_i is an exact discrete
// draw over the prior atoms.
class HeatBathChain {
 public:
  HeatBathChain(const Observation& obs, double lambda, const detail::Support& support,
                std::uint64_t seed)
      : obs_(obs), support_(support), rng_(seed), x_(obs.n) {
    const double n = static_cast<double>(obs.n);
    scale_ = std::sqrt(lambda / n);
    penalty_ = lambda / (2.0 * n);
    inv_s2_ = obs.diag ? 1.0 / (obs.sigma * obs.sigma) : 0.0;
    std::vector<double> weights;
    for (double lw : support.log_weights) weights.push_back(std::exp(lw));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    for (double& xi : x_) xi = support.atoms[pick(rng_)];
    exponents_.resize(support.atoms.size());
  }

  void sweep() {
    const std::size_t n = obs_.n;
    double sum_sq = 0.0;
    for (double xi : x_) sum_sq += xi * xi;
    for (std::size_t i = 0; i < n; ++i) {
      double field = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) field += (i < j ? obs_.at(i, j) : obs_.at(j, i)) * x_[j];
      }
      const double others = sum_sq - x_[i] * x_[i];
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < support_.atoms.size(); ++k) {
        const double a = support_.atoms[k];
        const double a2 = a * a;
        double e = scale_ * a * field - penalty_ * a2 * others + support_.log_weights[k];
        if (obs_.diag) e += inv_s2_ * (scale_ * (*obs_.diag)[i] * a2 - penalty_ * a2 * a2);
        exponents_[k] = e;
        top = std::max(top, e);
      }
      double total = 0.0;
      for (double& e : exponents_) total += (e = std::exp(e - top));
      double u = std::uniform_real_distribution<double>(0.0, total)(rng_);
      std::size_t pick = 0;
      while (pick + 1 < exponents_.size() && u >= exponents_[pick]) u -= exponents_[pick++];
      sum_sq += support_.atoms[pick] * support_.atoms[pick] - x_[i] * x_[i];
      x_[i] = support_.atoms[pick];
    }
  }

  const std::vector<double>& state() const { return x_; }

 private:
  const Observation& obs_;
  const detail::Support& support_;
  std::mt19937_64 rng_;
  std::vector<double> x_;
  std::vector<double> exponents_;
  double scale_ = 0.0;
  double penalty_ = 0.0;
  double inv_s2_ = 0.0;
};

struct BatchEstimate {
  double mean = 0.0;
  double se = 0.0;
};

BatchEstimate batch_means(std::span<const double> series, std::size_t batches) {
  const std::size_t size = series.size() / batches;
  if (size == 0) throw std::invalid_argument("overlap_moments: fewer measurements than batches");
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = std::accumulate(series.begin() + b * size, series.begin() + (b + 1) * size, 0.0) /
               static_cast<double>(size);
  }
  BatchEstimate out;
  out.mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - out.mean) * (m - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  return out;
}

OverlapStats gibbs_overlaps(const Observation& obs, std::span<const double> spike, double lambda,
                            const Prior& prior, const OverlapParams& params) {
  if (params.thin == 0 || params.batches < 4) {
    throw std::invalid_argument("overlap_moments: thin must be >= 1 and batches >= 4");
  }
  const detail::Support support = detail::positive_support(prior);
  const double nd = static_cast<double>(obs.n);
  HeatBathChain first(obs, lambda, support, derive_seed(params.seed, 0));
  HeatBathChain second(obs, lambda, support, derive_seed(params.seed, 1));
  for (std::size_t s = 0; s < params.burn_in; ++s) {
    first.sweep();
    second.sweep();
  }

  std::vector<double> r1s_2, r1s_4, r12_2, r12_4;
  for (std::size_t s = 1; s <= params.sweeps; ++s) {
    first.sweep();
    second.sweep();
    if (s % params.thin != 0) continue;
    const double ra = dot(first.state(), spike) / nd;
    const double rb = dot(second.state(), spike) / nd;
    const double rab = dot(first.state(), second.state()) / nd;
    r1s_2.push_back(0.5 * (ra * ra + rb * rb));
    r1s_4.push_back(0.5 * (ra * ra * ra * ra + rb * rb * rb * rb));
    r12_2.push_back(rab * rab);
    r12_4.push_back(rab * rab * rab * rab);
  }

  const std::size_t half = r1s_2.size() / 2;
  const std::size_t half_batches = params.batches / 2;
  const BatchEstimate early = batch_means(std::span(r1s_2).first(half), half_batches);
  const BatchEstimate late = batch_means(std::span(r1s_2).subspan(half, half), half_batches);
  if (std::abs(early.mean - late.mean) > 3.0 * std::hypot(early.se, late.se)) {
    throw ConvergenceError("overlap_moments: split-chain means of R_{1,*}^2 disagree");
  }

  OverlapStats stats;
  stats.method = OverlapMethod::gibbs;
  stats.n = obs.n;
  const BatchEstimate a = batch_means(r1s_2, params.batches);
  const BatchEstimate b = batch_means(r1s_4, params.batches);
  const BatchEstimate c = batch_means(r12_2, params.batches);
  const BatchEstimate d = batch_means(r12_4, params.batches);
  stats.e_r1star_sq = a.mean;
  stats.se_r1star_sq = a.se;
  stats.e_r1star_4 = b.mean;
  stats.se_r1star_4 = b.se;
  stats.e_r12_sq = c.mean;
  stats.se_r12_sq = c.se;
  stats.e_r12_4 = d.mean;
  stats.se_r12_4 = d.se;
  return stats;
}

}  // namespace

OverlapStats overlap_moments(const Observation& obs, std::span<const double> spike, double lambda,
                             const Prior& prior, OverlapMethod method,
                             const OverlapParams& params) {
  if (spike.size() != obs.n) {
    throw std::invalid_argument("overlap_moments: spike length does not match n");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("overlap_moments: lambda must be >= 0");
  return method == OverlapMethod::exact ? exact_overlaps(obs, spike, lambda, prior, params)
                                        : gibbs_overlaps(obs, spike, lambda, prior, params);
}

}  // namespace spiked

#include "spiked/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spiked {

double Prior::moment(int k) const {
  if (k < 0) throw std::invalid_argument("moment: k must be nonnegative");
  double sum = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    sum += weights_[i] * std::pow(atoms_[i], k);
  }
  return sum;
}

Prior make_discrete_prior(std::span<const double> atoms, std::span<const double> weights) {
  if (atoms.empty()) throw std::invalid_argument("prior: atom list is empty");
  if (atoms.size() != weights.size()) {
    throw std::invalid_argument("prior: atoms and weights differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i])) throw std::invalid_argument("prior: atom is not finite");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("prior: weights must be finite and nonnegative");
    }
    total += weights[i];
  }
  if (total <= 0.0) throw std::invalid_argument("prior: zero total mass");

  std::vector<double> sorted(atoms.begin(), atoms.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("prior: duplicate atoms");
  }

  Prior p;
  p.atoms_.assign(atoms.begin(), atoms.end());
  p.weights_.reserve(weights.size());
  for (double w : weights) p.weights_.push_back(w / total);
  for (double a : p.atoms_) p.support_radius_ = std::max(p.support_radius_, std::abs(a));
  p.centered_ = std::abs(p.moment(1)) <= Prior::kNormalizationTolerance;
  p.unit_variance_ = std::abs(p.moment(2) - 1.0) <= Prior::kNormalizationTolerance;
  return p;
}

Prior rademacher() {
  const double atoms[] = {-1.0, 1.0};
  const double weights[] = {0.5, 0.5};
  return make_discrete_prior(atoms, weights);
}

Prior sparse_rademacher(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("sparse_rademacher: rho must lie in (0, 1]");
  }
  if (rho == 1.0) return rademacher();
  const double a = 1.0 / std::sqrt(rho);
  const double atoms[] = {-a, 0.0, a};
  const double weights[] = {rho / 2.0, 1.0 - rho, rho / 2.0};
  return make_discrete_prior(atoms, weights);
}

Prior standardized(const Prior& prior, bool center) {
  const double shift = center ? prior.mean() : 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double a = prior.atoms()[i] - shift;
    second += prior.weights()[i] * a * a;
  }
  if (second <= 0.0) throw std::invalid_argument("standardized: degenerate prior");
  const double scale = 1.0 / std::sqrt(second);
  std::vector<double> atoms;
  atoms.reserve(prior.size());
  for (double a : prior.atoms()) atoms.push_back((a - shift) * scale);
  return make_discrete_prior(atoms, prior.weights());
}

}  // namespace spiked

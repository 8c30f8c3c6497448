#include "spiked/scalar_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "spiked/error.hpp"
#include "spiked/quadrature.hpp"

namespace spiked {
namespace {

constexpr double kHalfWidth = 12.0;

struct Line {
  double slope;
  double intercept;
};

// Breakpoints of max_k (slope_k z + intercept_k) on [lo, hi], endpoints
// included.
std::vector<double> envelope_breaks(const std::vector<Line>& lines, double lo, double hi) {
  std::vector<double> breaks{lo};
  auto value = [&](std::size_t k, double z) { return lines[k].slope * z + lines[k].intercept; };

  std::size_t current = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const double vk = value(k, lo), vc = value(current, lo);
    if (vk > vc || (vk == vc && lines[k].slope > lines[current].slope)) current = k;
  }
  double z = lo;
  for (std::size_t guard = 0; guard <= lines.size(); ++guard) {
    double next = hi;
    std::size_t next_line = current;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (lines[k].slope <= lines[current].slope) continue;
      const double zc = (lines[current].intercept - lines[k].intercept) /
                        (lines[k].slope - lines[current].slope);
      if (zc <= z) continue;
      if (zc < next || (zc == next && lines[k].slope > lines[next_line].slope)) {
        next = zc;
        next_line = k;
      }
    }
    if (next_line == current) break;
    breaks.push_back(next);
    z = next;
    current = next_line;
  }
  breaks.push_back(hi);
  return breaks;
}

// Real = long double is used where psi values feed high-order finite
// differences and rounding noise of the log-sum-exp would be amplified.
template <class Real>
Real integrate_lse(const std::vector<Line>& lines, int order) {
  const QuadratureRule& rule = cached_gauss_legendre(order);
  const std::vector<double> breaks = envelope_breaks(lines, -kHalfWidth, kHalfWidth);
  Real total = 0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const Real lo = breaks[p], hi = breaks[p + 1];
    if (hi - lo <= 0) continue;
    const Real half = (hi - lo) / 2, mid = (hi + lo) / 2;
    Real piece = 0;
    for (int q = 0; q < rule.order; ++q) {
      const Real z = mid + half * static_cast<Real>(rule.nodes[q]);
      Real top = -std::numeric_limits<Real>::infinity();
      for (const Line& l : lines) top = std::max(top, l.slope * z + l.intercept);
      Real sum = 0;
      for (const Line& l : lines) sum += std::exp(l.slope * z + l.intercept - top);
      piece += static_cast<Real>(rule.weights[q]) * (top + std::log(sum)) * std::exp(-z * z / 2);
    }
    total += half * piece;
  }
  return total / std::sqrt(2 * std::numbers::pi_v<Real>);
}

void require_nonnegative_r(double r, const char* what) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument(std::string(what) + ": r must be finite and >= 0");
  }
}

// Shared doubling loop; `eval(order)` returns the quadrature value at order.
template <class Eval>
double adaptive(const ChannelOptions& options, Eval&& eval) {
  double value = eval(options.order);
  if (!options.adaptive) return value;
  for (int order = 2 * options.order; order <= options.max_order; order *= 2) {
    const double refined = eval(order);
    if (std::abs(refined - value) <= options.tolerance * std::max(1.0, std::abs(refined))) {
      return refined;
    }
    value = refined;
  }
  throw ConvergenceError("scalar channel quadrature did not converge below max_order");
}

// Lines for E_z log sum_k p_k exp(sqrt(r) z a_k + shift * a_k - r a_k^2 / 2).
std::vector<Line> channel_lines(const Prior& prior, double r, double shift) {
  std::vector<Line> lines;
  lines.reserve(prior.size());
  const double root = std::sqrt(r);
  for (std::size_t k = 0; k < prior.size(); ++k) {
    const double p = prior.weights()[k];
    if (p <= 0.0) continue;
    const double a = prior.atoms()[k];
    lines.push_back({root * a, shift * a - 0.5 * r * a * a + std::log(p)});
  }
  return lines;
}

}  // namespace

double expected_log_sum_exp(std::span<const double> slopes, std::span<const double> intercepts,
                            int order) {
  if (slopes.size() != intercepts.size() || slopes.empty()) {
    throw std::invalid_argument("expected_log_sum_exp: mismatched or empty inputs");
  }
  std::vector<Line> lines;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (intercepts[k] == -std::numeric_limits<double>::infinity()) continue;
    lines.push_back({slopes[k], intercepts[k]});
  }
  if (lines.empty()) return -std::numeric_limits<double>::infinity();
  return integrate_lse<double>(lines, order);
}

template <class Real>
Real psi_at_order(const Prior& prior, double r, int order) {
  Real total = 0;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const double pj = prior.weights()[j];
    if (pj <= 0.0) continue;
    total += pj * integrate_lse<Real>(channel_lines(prior, r, r * prior.atoms()[j]), order);
  }
  return total;
}

double psi(const Prior& prior, double r, const ChannelOptions& options) {
  require_nonnegative_r(r, "psi");
  if (r == 0.0) return 0.0;
  return adaptive(options, [&](int order) { return psi_at_order<double>(prior, r, order); });
}

double psi_hat(const Prior& prior, double r, double s, const ChannelOptions& options) {
  require_nonnegative_r(r, "psi_hat");
  if (r == 0.0 && s == 0.0) return 0.0;
  return adaptive(options,
                  [&](int order) { return integrate_lse<double>(channel_lines(prior, r, s), order); });
}

double psi_bar(const Prior& prior, double r, double s, const ChannelOptions& options) {
  require_nonnegative_r(r, "psi_bar");
  return adaptive(options, [&](int order) {
    double total = 0.0;
    for (std::size_t j = 0; j < prior.size(); ++j) {
      const double pj = prior.weights()[j];
      if (pj <= 0.0) continue;
      total += pj * integrate_lse<double>(channel_lines(prior, r, s * prior.atoms()[j]), order);
    }
    return total;
  });
}

namespace {

// Spacings halve at each level; the Richardson table removes the O(h),
// O(h^2) and O(h^3) terms of psi'''(3h) - psi'''(0).
double third_derivative_extrapolated(const Prior& prior, const double (&spacings)[4]) {
  // f'''(c) ~ [f(c-3h)/8 - f(c-2h) + 13 f(c-h)/8 - 13 f(c+h)/8 + f(c+2h) - f(c+3h)/8] / h^3
  static constexpr double kStencil[7] = {0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125};
  double table[4][4];
  for (int s = 0; s < 4; ++s) {
    const double h = spacings[s];
    long double sum = 0;
    for (int k = 1; k < 7; ++k) {
      if (kStencil[k] == 0.0) continue;
      sum += kStencil[k] * psi_at_order<long double>(prior, k * h, 160);
    }
    table[s][0] = static_cast<double>(sum / (static_cast<long double>(h) * h * h));
    for (int j = 1; j <= s; ++j) {
      const double f = std::ldexp(1.0, j);
      table[s][j] = (f * table[s][j - 1] - table[s - 1][j - 1]) / (f - 1.0);
    }
  }
  return table[3][3];
}

}  // namespace

PsiDerivatives psi_derivatives_at_zero(const Prior& prior) {
  PsiDerivatives out;
  const double m1 = prior.moment(1);
  const double m2 = prior.moment(2);
  out.d1 = 0.5 * m1 * m1;
  out.d2 = 0.5 * m2 * m2;

  const double scale = 1.0 / std::max(1.0, prior.support_radius() * prior.support_radius());
  const double primary[4] = {1e-2 * scale, 5e-3 * scale, 2.5e-3 * scale, 1.25e-3 * scale};
  const double secondary[4] = {1.2e-2 * scale, 6e-3 * scale, 3e-3 * scale, 1.5e-3 * scale};
  out.d3 = third_derivative_extrapolated(prior, primary);
  out.d3_cross_check = third_derivative_extrapolated(prior, secondary);
  const double gap = std::abs(out.d3 - out.d3_cross_check);
  if (gap > 1e-3 * std::max(std::abs(out.d3), std::abs(out.d3_cross_check)) + 1e-7) {
    throw ConvergenceError("psi_derivatives_at_zero: stencils disagree on psi'''(0): " +
                           std::to_string(out.d3) + " vs " + std::to_string(out.d3_cross_check));
  }
  return out;
}

}  // namespace spiked

#include "spiked/observation.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace spiked {
namespace {

void validate(std::size_t n, double lambda, double sigma) {
  if (n < 2) throw std::invalid_argument("observation: n must be >= 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("observation: lambda must be finite and >= 0");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("observation: sigma must be > 0");
}

Observation draw(std::span<const double> spike, std::size_t n, double lambda, double sigma,
                 std::uint64_t seed, std::mt19937_64& rng) {
  Observation obs;
  obs.n = n;
  obs.sigma = sigma;
  obs.lambda_true = lambda;
  obs.seed = seed;
  obs.upper.resize(n * (n - 1) / 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(lambda / static_cast<double>(n));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++idx) {
      const double signal = spike.empty() ? 0.0 : scale * spike[i] * spike[j];
      obs.upper[idx] = signal + normal(rng);
    }
  }
  if (std::isfinite(sigma)) {
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double signal = spike.empty() ? 0.0 : scale * spike[i] * spike[i];
      diag[i] = signal + sigma * normal(rng);
    }
    obs.diag = std::move(diag);
  }
  return obs;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw std::runtime_error("read_observation: truncated file");
  }
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

SampledObservation sample_observation(const Prior& prior, std::size_t n, double lambda,
                                      double sigma, std::uint64_t seed) {
  validate(n, lambda, sigma);
  std::mt19937_64 rng(seed);
  SampledObservation out;
  std::vector<double> spike;
  if (lambda > 0.0) {
    std::discrete_distribution<std::size_t> pick(prior.weights().begin(), prior.weights().end());
    spike.resize(n);
    for (double& x : spike) x = prior.atoms()[pick(rng)];
  }
  out.observation = draw(spike, n, lambda, sigma, seed, rng);
  if (lambda > 0.0) out.spike = std::move(spike);
  return out;
}

Observation sample_planted(std::span<const double> spike, double lambda, double sigma,
                           std::uint64_t seed) {
  validate(spike.size(), lambda, sigma);
  std::mt19937_64 rng(seed);
  return draw(spike, spike.size(), lambda, sigma, seed, rng);
}

double hamiltonian(const Observation& obs, std::span<const double> x, double lambda) {
  if (x.size() != obs.n) throw std::invalid_argument("hamiltonian: length mismatch");
  if (!(lambda >= 0.0)) throw std::invalid_argument("hamiltonian: lambda must be >= 0");
  const double n = static_cast<double>(obs.n);
  const double scale = std::sqrt(lambda / n);
  const double penalty = lambda / (2.0 * n);
  double total = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < obs.n; ++i) {
    for (std::size_t j = i + 1; j < obs.n; ++j, ++idx) {
      const double xx = x[i] * x[j];
      total += scale * obs.upper[idx] * xx - penalty * xx * xx;
    }
  }
  if (obs.diag) {
    const double inv_s2 = 1.0 / (obs.sigma * obs.sigma);
    for (std::size_t i = 0; i < obs.n; ++i) {
      const double x2 = x[i] * x[i];
      total += inv_s2 * (scale * (*obs.diag)[i] * x2 - penalty * x2 * x2);
    }
  }
  return total;
}

double top_eigenvalue(const Observation& obs) {
  const auto n = static_cast<Eigen::Index>(obs.n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (obs.diag) m(i, i) = (*obs.diag)[i];
    for (Eigen::Index j = i + 1; j < n; ++j, ++idx) {
      m(i, j) = obs.upper[idx];
      m(j, i) = obs.upper[idx];
    }
  }
  m /= std::sqrt(static_cast<double>(obs.n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("top_eigenvalue: solver failed");
  return solver.eigenvalues().maxCoeff();
}

void write_observation(const Observation& obs, const std::filesystem::path& path) {
  if (obs.upper.size() != obs.n * (obs.n - 1) / 2) {
    throw std::invalid_argument("write_observation: upper array has the wrong length");
  }
  if (obs.has_diagonal() != std::isfinite(obs.sigma)) {
    throw std::invalid_argument("write_observation: diagonal must be present iff sigma is finite");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_observation: cannot open " + path.string());
  put_u64(out, obs.n);
  put_f64(out, obs.sigma);
  put_f64(out, obs.lambda_true);
  put_u64(out, obs.seed);
  for (double v : obs.upper) put_f64(out, v);
  if (obs.diag) {
    for (double v : *obs.diag) put_f64(out, v);
  }
  if (!out) throw std::runtime_error("write_observation: write failed");
}

Observation read_observation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_observation: cannot open " + path.string());
  Observation obs;
  obs.n = get_u64(in);
  if (obs.n < 2 || obs.n > (1u << 20)) throw std::runtime_error("read_observation: bad n");
  obs.sigma = get_f64(in);
  if (!(obs.sigma > 0.0)) throw std::runtime_error("read_observation: bad sigma field");
  obs.lambda_true = get_f64(in);
  obs.seed = get_u64(in);
  obs.upper.resize(obs.n * (obs.n - 1) / 2);
  for (double& v : obs.upper) v = get_f64(in);
  if (std::isfinite(obs.sigma)) {
    std::vector<double> diag(obs.n);
    for (double& v : diag) v = get_f64(in);
    obs.diag = std::move(diag);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("read_observation: trailing bytes");
  }
  return obs;
}

}  // namespace spiked

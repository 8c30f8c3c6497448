#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "spiked/observation.hpp"
#include "spiked/prior.hpp"
#include "spiked/statistics.hpp"

using namespace spiked;

namespace {

// Direct double loop over the full symmetric matrix.
double naive_minus_h(const Observation& obs, const std::vector<double>& x, double lambda) {
  const double n = static_cast<double>(obs.n);
  double total = 0.0;
  for (std::size_t i = 0; i < obs.n; ++i) {
    for (std::size_t j = 0; j < obs.n; ++j) {
      if (i == j) continue;
      const double y = i < j ? obs.at(i, j) : obs.at(j, i);
      total += 0.5 * (std::sqrt(lambda / n) * y * x[i] * x[j] - lambda / (2 * n) * x[i] * x[i] * x[j] * x[j]);
    }
    if (obs.diag) {
      const double s2 = obs.sigma * obs.sigma;
      total += (std::sqrt(lambda / n) * (*obs.diag)[i] * x[i] * x[i] - lambda / (2 * n) * std::pow(x[i], 4)) / s2;
    }
  }
  return total;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("upper index is row-major over i < j") {
  std::size_t k = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) CHECK(Observation::upper_index(6, i, j) == k++);
  }
}

TEST_CASE("null entries are standard normal") {
  const auto draw = sample_observation(rademacher(), 448, 0.0, kSigmaInfinity, 17);
  CHECK_FALSE(draw.spike.has_value());
  CHECK_FALSE(draw.observation.has_diagonal());
  REQUIRE(draw.observation.upper.size() == 448 * 447 / 2);
  const auto& y = draw.observation.upper;
  const double d = ks_statistic_normal(y, 0.0, 1.0);
  CHECK(ks_p_value(d, y.size()) > 0.01);
}

TEST_CASE("top eigenvalue at the spectral threshold sits near the bulk edge") {
  const auto draw = sample_observation(rademacher(), 1000, 1.0, kSigmaInfinity, 23);
  CHECK(std::abs(top_eigenvalue(draw.observation) - 2.0) <= 0.15);
}

TEST_CASE("planted structure shifts the entries") {
  const auto draw = sample_observation(rademacher(), 300, 4.0, kSigmaInfinity, 5);
  REQUIRE(draw.spike.has_value());
  const auto& x = *draw.spike;
  double s = 0.0;
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = i + 1; j < 300; ++j) s += draw.observation.at(i, j) * x[i] * x[j];
  }
  const double pairs = 300.0 * 299.0 / 2.0;
  CHECK(std::abs(s / pairs - std::sqrt(4.0 / 300.0)) <= 4.0 / std::sqrt(pairs));
  // Top eigenvalue of the BBP regime: sqrt(lambda) + 1/sqrt(lambda) = 2.5.
  CHECK(std::abs(top_eigenvalue(draw.observation) - 2.5) <= 0.2);
}

TEST_CASE("sampling is deterministic") {
  const auto a = sample_observation(sparse_rademacher(0.3), 9, 0.7, 1.5, 99);
  const auto b = sample_observation(sparse_rademacher(0.3), 9, 0.7, 1.5, 99);
  CHECK(a.observation.upper == b.observation.upper);
  CHECK(*a.observation.diag == *b.observation.diag);
  CHECK(*a.spike == *b.spike);
  const auto c = sample_observation(sparse_rademacher(0.3), 9, 0.7, 1.5, 100);
  CHECK(a.observation.upper != c.observation.upper);
}

TEST_CASE("finite sigma carries a diagonal") {
  const auto draw = sample_observation(rademacher(), 5, 0.5, 2.0, 1);
  REQUIRE(draw.observation.has_diagonal());
  CHECK(draw.observation.diag->size() == 5);
  CHECK(draw.observation.sigma == 2.0);
}

TEST_CASE("invalid sampling arguments") {
  CHECK_THROWS_AS(sample_observation(rademacher(), 1, 0.5, kSigmaInfinity, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_observation(rademacher(), 4, -0.5, kSigmaInfinity, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_observation(rademacher(), 4, 0.5, 0.0, 1), std::invalid_argument);
}

TEST_CASE("hamiltonian") {
  const auto draw = sample_observation(rademacher(), 3, 0.8, kSigmaInfinity, 42);
  const std::vector<double> zero(3, 0.0), x{1.0, -1.0, 1.0};
  CHECK(hamiltonian(draw.observation, zero, 0.8) == 0.0);
  CHECK(hamiltonian(draw.observation, x, 0.0) == 0.0);
  CHECK(std::abs(hamiltonian(draw.observation, x, 0.8) - naive_minus_h(draw.observation, x, 0.8)) <= 1e-12);

  const auto diag = sample_observation(sparse_rademacher(0.4), 6, 0.6, 0.7, 8);
  const std::vector<double> y{0.3, -1.2, 0.0, 2.0, -0.5, 1.1};
  CHECK(std::abs(hamiltonian(diag.observation, y, 0.6) - naive_minus_h(diag.observation, y, 0.6)) <= 1e-12);
  CHECK_THROWS_AS(hamiltonian(diag.observation, x, 0.6), std::invalid_argument);
}

TEST_CASE("binary round trip") {
  for (double sigma : {kSigmaInfinity, 1.25}) {
    const auto draw = sample_observation(rademacher(), 7, 0.4, sigma, 77);
    const auto path = temp_file("spiked_obs_roundtrip.bin");
    write_observation(draw.observation, path);
    const std::size_t expected = 32 + 8 * (21 + (std::isfinite(sigma) ? 7 : 0));
    CHECK(std::filesystem::file_size(path) == expected);
    const Observation back = read_observation(path);
    CHECK(back.n == 7);
    CHECK(back.sigma == sigma);
    CHECK(back.lambda_true == 0.4);
    CHECK(back.seed == 77);
    CHECK(back.upper == draw.observation.upper);
    CHECK(back.diag == draw.observation.diag);
    std::filesystem::remove(path);
  }
}

TEST_CASE("binary layout is little-endian") {
  Observation obs;
  obs.n = 2;
  obs.upper = {1.0};
  obs.seed = 0x0102030405060708ULL;
  const auto path = temp_file("spiked_obs_layout.bin");
  write_observation(obs, path);
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 40);
  CHECK(bytes[0] == 2);
  CHECK(bytes[24] == 0x08);
  CHECK(bytes[31] == 0x01);
  // +inf sigma: 0x7ff0000000000000.
  CHECK(bytes[15] == 0x7f);
  CHECK(bytes[14] == 0xf0);
  // 1.0 = 0x3ff0000000000000.
  CHECK(bytes[39] == 0x3f);
  in.close();

  std::ofstream(path, std::ios::binary | std::ios::app) << 'x';
  CHECK_THROWS(read_observation(path));
  std::filesystem::remove(path);
  CHECK_THROWS(read_observation(path));
}

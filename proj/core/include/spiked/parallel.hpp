#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace spiked {

/// Worker count: SPIKED_LIMITS_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = use
/// worker_count()). Indices are handed out in contiguous blocks; callers
/// write results into slot i so the merge order never depends on scheduling.
/// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

/// Stateless seed derivation for independent parallel units (splitmix64 mix
/// of the parent seed and a unit index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t unit);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace spiked

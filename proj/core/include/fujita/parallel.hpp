#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace fujita {

/// Worker count: FUJITA_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Work is
/// split into contiguous chunks; body must only write to slots it owns.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer. Used to derive independent, schedule-free seeds
/// from (seed, stream, index) triples.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) noexcept;

}  // namespace fujita

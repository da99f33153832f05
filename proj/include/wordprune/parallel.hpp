#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace wordprune {

/// Worker count: WORDPRUNE_THREADS if set, else hardware concurrency.
[[nodiscard]] std::size_t default_thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
/// write into pre-sized slots so results are order-stable.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer; used to derive independent per-block / per-trial seeds.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

} // namespace wordprune

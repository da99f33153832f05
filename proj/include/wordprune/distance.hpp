#pragma once

// Distance functions and the descriptor-centroid evaluation counter.
//
// Every descriptor-to-centroid distance in the library goes through
// `distances_to_centroids`, which bumps a process-wide counter. Pruning code
// never calls it; tests read the counter to prove that.

#include <cstdint>
#include <span>

#include "wordprune/core.hpp"

namespace wordprune {

[[nodiscard]] double point_distance(std::span<const double> a, std::span<const double> b, Metric metric);

/// Centroid-to-centroid distance (codebook geometry). Not counted.
[[nodiscard]] inline double centroid_distance(std::span<const double> a, std::span<const double> b,
                                              Metric metric) {
    return point_distance(a, b, metric);
}

/// Fills out[k-1] = delta(x, c_k) for every word of the codebook and adds K
/// to the descriptor distance counter.
void distances_to_centroids(std::span<const double> x, const Codebook& codebook, std::span<double> out);

/// Total descriptor-centroid distance evaluations performed by this process.
[[nodiscard]] std::uint64_t descriptor_distance_count() noexcept;

/// Counter delta over a scope.
class DistanceCountScope {
public:
    DistanceCountScope() noexcept : start_(descriptor_distance_count()) {}
    [[nodiscard]] std::uint64_t evaluations() const noexcept { return descriptor_distance_count() - start_; }

private:
    std::uint64_t start_;
};

} // namespace wordprune

#include "wordprune/distance.hpp"

#include <atomic>
#include <cmath>

namespace wordprune {

namespace {
std::atomic<std::uint64_t> g_descriptor_distances{0};
}

double point_distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    double acc = 0.0;
    switch (metric) {
    case Metric::squared_euclidean:
    case Metric::euclidean:
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double d = a[j] - b[j];
            acc += d * d;
        }
        return metric == Metric::euclidean ? std::sqrt(acc) : acc;
    case Metric::manhattan:
        for (std::size_t j = 0; j < a.size(); ++j) acc += std::abs(a[j] - b[j]);
        return acc;
    }
    return acc;
}

void distances_to_centroids(std::span<const double> x, const Codebook& codebook, std::span<double> out) {
    const std::size_t K = codebook.size();
    if (x.size() != codebook.dim()) {
        fail_data("descriptor dimension " + std::to_string(x.size()) + " does not match codebook dimension " +
                  std::to_string(codebook.dim()));
    }
    for (std::size_t k = 0; k < K; ++k) {
        out[k] = point_distance(x, codebook.centroids().row(k), codebook.metric());
    }
    g_descriptor_distances.fetch_add(K, std::memory_order_relaxed);
}

std::uint64_t descriptor_distance_count() noexcept {
    return g_descriptor_distances.load(std::memory_order_relaxed);
}

} // namespace wordprune

#pragma once

// K-means codebook construction and neighbor-table precomputation.

#include <cstdint>
#include <vector>

#include "wordprune/core.hpp"

namespace wordprune {

struct KMeansParams {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::size_t max_iter = 100;
    double tol = 1e-6;                 ///< stop when mean centroid shift drops below this
    Metric metric = Metric::squared_euclidean; ///< recorded on the codebook
};

struct KMeansResult {
    Matrix centroids;
    std::vector<double> objective;     ///< sum of squared distances after each assignment step
    std::size_t iterations = 0;
    std::size_t reseeded_clusters = 0;
};

/// Stacks the descriptors of every image into one matrix (image order, row order).
[[nodiscard]] Matrix stack_descriptors(const DescriptorCorpus& corpus);

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded at
/// the point farthest from its assigned center. Throws if the points hold
/// fewer than k distinct rows.
[[nodiscard]] KMeansResult kmeans(const Matrix& points, const KMeansParams& params);

/// k-means followed by codebook validation (K >= 2).
[[nodiscard]] Codebook build_codebook(const DescriptorCorpus& corpus, const KMeansParams& params);

/// Exact nearest-neighbor lists under the codebook metric. Each list holds
/// `depth` entries (default m); the heuristic uses the first m.
[[nodiscard]] NeighborTable build_neighbor_table(const Codebook& codebook, std::size_t m, std::size_t depth = 0);

} // namespace wordprune

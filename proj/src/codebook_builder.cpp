#include "wordprune/codebook_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wordprune/distance.hpp"
#include "wordprune/parallel.hpp"

namespace wordprune {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    return point_distance(a, b, Metric::squared_euclidean);
}

std::size_t count_distinct_rows(const Matrix& points, std::size_t stop_at) {
    std::vector<std::size_t> order(points.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        auto ra = points.row(a), rb = points.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size() && distinct < stop_at; ++i) {
        if (less(order[i - 1], order[i])) ++distinct;
    }
    return distinct;
}

// Uniform double in [0,1) from 53 random bits; avoids library-specific
// distribution implementations so seeding is reproducible across toolchains.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Matrix seed_plus_plus(const Matrix& points, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = points.rows();
    Matrix centers(0, 0);
    centers.append_row(points.row(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points.row(i), centers.row(0));
    while (centers.rows() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (d2[pick] == 0.0 && pick > 0) --pick;
        }
        centers.append_row(points.row(pick));
        const auto c = centers.row(centers.rows() - 1);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points.row(i), c));
    }
    return centers;
}

} // namespace

Matrix stack_descriptors(const DescriptorCorpus& corpus) {
    Matrix out(corpus.total_descriptors(), corpus.dim());
    std::size_t r = 0;
    for (const auto& img : corpus.images()) {
        for (std::size_t i = 0; i < img.descriptors.rows(); ++i, ++r) {
            std::copy_n(img.descriptors.row(i).begin(), corpus.dim(), out.row(r).begin());
        }
    }
    return out;
}

KMeansResult kmeans(const Matrix& points, const KMeansParams& params) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    const std::size_t k = params.k;
    if (k == 0) fail_usage("k-means needs K >= 1");
    if (n < k) fail_data("K=" + std::to_string(k) + " exceeds the number of descriptors (" + std::to_string(n) + ")");
    if (const std::size_t distinct = count_distinct_rows(points, k); distinct < k) {
        fail_data("K=" + std::to_string(k) + " exceeds the number of distinct descriptors (" +
                  std::to_string(distinct) + ")");
    }

    std::mt19937_64 rng(params.seed);
    KMeansResult res;
    res.centroids = seed_plus_plus(points, k, rng);

    std::vector<std::size_t> assign(n);
    std::vector<double> dist(n);
    for (std::size_t it = 0; it < params.max_iter; ++it) {
        // Assignment (parallel, per-point independent).
        parallel_for(n, [&](std::size_t i) {
            std::size_t best = 0;
            double bd = sq_dist(points.row(i), res.centroids.row(0));
            for (std::size_t c = 1; c < k; ++c) {
                const double dc = sq_dist(points.row(i), res.centroids.row(c));
                if (dc < bd) {
                    bd = dc;
                    best = c;
                }
            }
            assign[i] = best;
            dist[i] = bd;
        });
        double objective = 0.0;
        for (double v : dist) objective += v;
        res.objective.push_back(objective);

        // Update, summed in descriptor order.
        Matrix sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto s = sums.row(assign[i]);
            auto p = points.row(i);
            for (std::size_t j = 0; j < d; ++j) s[j] += p[j];
            ++counts[assign[i]];
        }
        Matrix next(k, d);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < d; ++j) next(c, j) = sums(c, j) / static_cast<double>(counts[c]);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            // Farthest point from its own (already updated) center; take it over.
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] <= 1) continue;
                const double di = sq_dist(points.row(i), next.row(assign[i]));
                if (di > fd) {
                    fd = di;
                    far = i;
                }
            }
            --counts[assign[far]];
            assign[far] = c;
            counts[c] = 1;
            std::copy_n(points.row(far).begin(), d, next.row(c).begin());
            ++res.reseeded_clusters;
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) shift += std::sqrt(sq_dist(next.row(c), res.centroids.row(c)));
        shift /= static_cast<double>(k);
        res.centroids = std::move(next);
        res.iterations = it + 1;
        if (shift < params.tol) break;
    }
    return res;
}

Codebook build_codebook(const DescriptorCorpus& corpus, const KMeansParams& params) {
    if (params.k < 2) fail_usage("a codebook needs K >= 2 words");
    KMeansResult res = kmeans(stack_descriptors(corpus), params);
    return Codebook::from_centroids(std::move(res.centroids), params.metric);
}

NeighborTable build_neighbor_table(const Codebook& codebook, std::size_t m, std::size_t depth) {
    const std::size_t K = codebook.size();
    if (m == 0) fail_usage("neighbor count m must be positive");
    if (m >= K) {
        fail_usage("neighbor count m=" + std::to_string(m) + " must be smaller than K=" + std::to_string(K));
    }
    if (depth == 0) depth = m;
    depth = std::min(std::max(depth, m), K - 1);

    std::vector<std::vector<WordIndex>> lists(K);
    parallel_for(K, [&](std::size_t l) {
        std::vector<std::pair<double, WordIndex>> cand;
        cand.reserve(K - 1);
        for (std::size_t k = 0; k < K; ++k) {
            if (k == l) continue;
            cand.emplace_back(centroid_distance(codebook.centroids().row(l), codebook.centroids().row(k),
                                                codebook.metric()),
                              k + 1);
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(depth), cand.end());
        lists[l].reserve(depth);
        for (std::size_t r = 0; r < depth; ++r) lists[l].push_back(cand[r].second);
    });
    return NeighborTable(m, std::move(lists));
}

} // namespace wordprune

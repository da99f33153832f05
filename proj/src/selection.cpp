#include "wordprune/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wordprune/distance.hpp"
#include "wordprune/pruning.hpp"

namespace wordprune {

std::size_t AnnealConfig::effective_move_size() const noexcept { return std::min(move_size, target_size); }

void AnnealConfig::validate(std::size_t K) const {
    if (!(lambda > 0.0 && lambda < 1.0)) fail_usage("lambda must lie in (0, 1)");
    if (tmax == 0) fail_usage("tmax must be at least 1");
    if (target_size < 1 || target_size >= K) {
        fail_usage("target size must satisfy 1 <= |T| < K (got |T|=" + std::to_string(target_size) +
                   ", K=" + std::to_string(K) + ")");
    }
    if (move_size < 1) fail_usage("move size must be at least 1");
}

double acceptance_probability(double delta_e, double lambda, std::size_t t) noexcept {
    if (delta_e >= 0.0) return 1.0;
    const double temperature = std::pow(lambda, static_cast<double>(t));
    if (temperature <= 0.0) return 0.0;
    return std::min(1.0, std::exp(delta_e / temperature));
}

std::vector<WordIndex> neighbor_move(std::span<const WordIndex> current, std::size_t move_size,
                                     const NeighborTable& table, std::mt19937_64& rng) {
    const std::size_t K = table.words();
    std::vector<char> member(K + 1, 0);
    for (WordIndex w : current) {
        if (w < 1 || w > K || member[w]) fail_data("neighbor move: malformed subset");
        member[w] = 1;
    }
    move_size = std::min(move_size, current.size());

    // Uniformly ordered members; the first move_size that can move are moved.
    std::vector<WordIndex> pool(current.begin(), current.end());
    std::shuffle(pool.begin(), pool.end(), rng);

    std::size_t moved = 0;
    for (std::size_t p = 0; p < pool.size() && moved < move_size; ++p) {
        const WordIndex a = pool[p];
        member[a] = 0;
        WordIndex replacement = 0;
        for (WordIndex w : table.extended(a)) {
            if (!member[w]) {
                replacement = w;
                break;
            }
        }
        if (replacement == 0) {
            member[a] = 1; // neighbor list exhausted: keep it and try a fresh member
            continue;
        }
        member[replacement] = 1;
        ++moved;
    }
    if (moved < move_size) {
        fail_data("neighbor move: neighbor lists exhausted after trying every member (K too small for |T|)");
    }

    std::vector<WordIndex> next;
    next.reserve(current.size());
    for (WordIndex w = 1; w <= K; ++w) {
        if (member[w]) next.push_back(w);
    }
    return next;
}

RepresentationMatrix representations_for(const AnnealInputs& inputs, Scheme scheme, std::span<const WordIndex> subset) {
    if (scheme == Scheme::hard) {
        if (!inputs.initial || !inputs.neighbors) fail_usage("hard-coding search needs Pi^0 and a neighbor table");
        const auto& all = inputs.initial->active_words();
        return prune_hard(*inputs.initial, PruneSet::keep(all, subset), *inputs.neighbors);
    }
    if (!inputs.coding) fail_usage("soft-coding search needs the retained coding matrix");
    std::vector<WordIndex> all(inputs.coding->words());
    std::iota(all.begin(), all.end(), WordIndex{1});
    return prune_soft(*inputs.coding, PruneSet::keep(all, subset));
}

namespace {

// Previous-matrix mode: start from the last accepted matrix, give entering
// words an empty bin and transfer the leaving words' mass.
RepresentationMatrix chain_from(const RepresentationMatrix& prev, std::span<const WordIndex> next,
                                const NeighborTable& table) {
    const auto& old = prev.active_words();
    std::vector<WordIndex> uni;
    std::set_union(old.begin(), old.end(), next.begin(), next.end(), std::back_inserter(uni));
    Matrix widened(prev.size(), uni.size());
    for (std::size_t r = 0; r < prev.size(); ++r) {
        std::size_t j = 0;
        for (std::size_t u = 0; u < uni.size(); ++u) {
            if (j < old.size() && old[j] == uni[u]) widened(r, u) = prev.values()(r, j++);
        }
    }
    auto base = RepresentationMatrix::make(std::move(widened), uni, prev.ids(), prev.labels());
    return prune_hard(base, PruneSet::keep(uni, next), table);
}

} // namespace

AnnealResult anneal(const AnnealInputs& inputs, const AnnealConfig& config) {
    if (!inputs.neighbors) fail_usage("annealing needs a neighbor table");
    const std::size_t K = inputs.neighbors->words();
    if (config.scheme == Scheme::hard) {
        if (!inputs.initial) fail_usage("hard-coding search needs the initial representation matrix");
        if (inputs.initial->active_words().size() != K) fail_data("Pi^0 must cover the whole codebook");
    } else {
        if (!inputs.coding) fail_usage("soft-coding search needs the retained coding matrix");
        if (inputs.coding->words() != K) fail_data("coding matrix must cover the whole codebook");
    }
    config.validate(K);

    const DistanceCountScope counter;
    AnnealState st;
    st.rng.seed(config.seed);

    std::vector<WordIndex> all(K);
    std::iota(all.begin(), all.end(), WordIndex{1});
    std::shuffle(all.begin(), all.end(), st.rng);
    std::vector<WordIndex> candidate(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(config.target_size));
    std::sort(candidate.begin(), candidate.end());

    const bool chained = config.chain == ChainMode::previous && config.scheme == Scheme::hard;
    std::optional<RepresentationMatrix> accepted_matrix;
    AnnealResult result;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    for (st.t = 0; st.t < config.tmax; ++st.t) {
        const std::size_t t = st.t;
        RepresentationMatrix pruned = (chained && accepted_matrix)
                                          ? chain_from(*accepted_matrix, candidate, *inputs.neighbors)
                                          : representations_for(inputs, config.scheme, candidate);
        ScoreReport report = max_relevance(pruned, config.marginal);
        const double e = report.score;
        if (report.degenerate_bins > 0) ++result.degenerate_iterations;

        bool accept = true;
        if (t > 0) {
            const double p = acceptance_probability(e - st.current_energy, config.lambda, t);
            accept = !(p < uniform(st.rng));
        }
        if (e > st.best_energy) {
            st.best_energy = e;
            st.best = candidate;
            result.best_report = std::move(report);
        }
        if (accept) {
            st.current = candidate;
            st.current_energy = e;
            if (chained) accepted_matrix = std::move(pruned);
        }
        st.trace.push_back({t, e, accept, std::pow(config.lambda, static_cast<double>(t)), st.current_energy});
        candidate = neighbor_move(st.current, config.effective_move_size(), *inputs.neighbors, st.rng);
    }

    result.best_subset = st.best;
    result.best_energy = st.best_energy;
    result.trace = std::move(st.trace);
    result.final_subset = st.current;
    result.distance_evaluations = counter.evaluations();
    return result;
}

} // namespace wordprune

#pragma once

// Simulated-annealing search over fixed-size visual word subsets.
//
// Each iteration derives the pruned representation matrix for the current
// candidate subset (transfer maps for hard coding, renormalization of the
// retained coefficients for soft coding), scores it by maximum relevance and
// applies the acceptance rule min(1, exp(delta_e / lambda^t)).

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "wordprune/core.hpp"
#include "wordprune/scoring.hpp"

namespace wordprune {

/// Where each iteration's pruned matrix comes from.
enum class ChainMode {
    initial,  ///< always from the untouched initial matrix / coefficients
    previous, ///< hard coding only: transfer from the previous iteration's matrix
};

struct AnnealConfig {
    double lambda = 0.9;
    std::size_t tmax = 100;       ///< 100 for hard coding, 500 for soft coding by default
    std::size_t target_size = 0;  ///< |T|, kept fixed during the search
    std::size_t move_size = 10;   ///< members replaced per move (capped at target_size)
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::hard;
    ChainMode chain = ChainMode::initial;
    MarginalModel marginal = MarginalModel::class_mixture;

    [[nodiscard]] static std::size_t default_tmax(Scheme s) noexcept { return s == Scheme::hard ? 100 : 500; }
    /// Number of members actually replaced: min(move_size, target_size).
    [[nodiscard]] std::size_t effective_move_size() const noexcept;
    /// Throws (usage) unless 0 < lambda < 1, 1 <= move_size, 1 <= target_size < K.
    void validate(std::size_t K) const;
};

struct TraceRow {
    std::size_t t = 0;
    double energy = 0.0;       ///< energy of the subset evaluated at step t
    bool accepted = false;
    double temperature = 1.0;  ///< lambda^t
    double current_energy = 0.0; ///< chain energy after the accept/reject decision
};

struct AnnealState {
    std::vector<WordIndex> current;
    double current_energy = 0.0;
    std::vector<WordIndex> best;
    double best_energy = -std::numeric_limits<double>::infinity();
    std::size_t t = 0;
    std::mt19937_64 rng;
    std::vector<TraceRow> trace;
};

/// Replace `move_size` uniformly chosen members, each with its nearest
/// neighbor that is not already in the candidate. Result stays sorted with
/// exactly |current| distinct words.
[[nodiscard]] std::vector<WordIndex> neighbor_move(std::span<const WordIndex> current, std::size_t move_size,
                                                   const NeighborTable& table, std::mt19937_64& rng);

/// min(1, exp(delta_e / lambda^t)).
[[nodiscard]] double acceptance_probability(double delta_e, double lambda, std::size_t t) noexcept;

/// What the search works on. Hard coding needs `initial` (Pi^0); soft coding
/// needs `coding` (H). The neighbor table drives moves in both cases.
struct AnnealInputs {
    const NeighborTable* neighbors = nullptr;
    const RepresentationMatrix* initial = nullptr;
    const CodingMatrix* coding = nullptr;
};

struct AnnealResult {
    std::vector<WordIndex> best_subset;
    double best_energy = 0.0;
    ScoreReport best_report;
    std::vector<TraceRow> trace;
    std::vector<WordIndex> final_subset;
    std::size_t degenerate_iterations = 0; ///< iterations whose score had a degenerate bin
    std::uint64_t distance_evaluations = 0;
};

/// Pruned representation matrix of `subset` as the search computes it.
[[nodiscard]] RepresentationMatrix representations_for(const AnnealInputs& inputs, Scheme scheme,
                                                       std::span<const WordIndex> subset);

[[nodiscard]] AnnealResult anneal(const AnnealInputs& inputs, const AnnealConfig& config);

} // namespace wordprune

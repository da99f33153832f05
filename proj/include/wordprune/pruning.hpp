#pragma once

// Updating pooled representations when visual words are removed,
// without touching descriptors.
//
// Hard coding: the pruned word's bin is handed to its neighbors, either
// uniformly over the m metric-nearest surviving words (psi_heuristic) or
// with transition weights Lambda (psi_exact). Soft coding: retained
// coefficients are renormalized over the survivors (prune_soft), which is
// exactly what re-coding with the smaller codebook would produce.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wordprune/core.hpp"

namespace wordprune {

/// Lambda_{k,l}: share of the pruned word l's mass that moves to surviving word k.
struct TransitionWeights {
    WordIndex pruned = 0;
    std::vector<std::pair<WordIndex, double>> weights; ///< ascending word index
    std::uint64_t kept_samples = 0;                   ///< Monte-Carlo samples that fell in R(c_l)
    std::uint64_t total_samples = 0;

    static constexpr double sum_tolerance = 1e-9;

    /// Weight of word k (0 if outside the support).
    [[nodiscard]] double weight(WordIndex k) const noexcept;
    /// Throws unless weights are in [0,1], sum to 1 and avoid `pruned`.
    void validate() const;
};

/// Removed words S and survivors T = active \ S, both ascending.
class PruneSet {
public:
    static PruneSet make(std::span<const WordIndex> active, std::span<const WordIndex> pruned);
    /// Complement form: survivors given directly.
    static PruneSet keep(std::span<const WordIndex> active, std::span<const WordIndex> surviving);

    [[nodiscard]] const std::vector<WordIndex>& pruned() const noexcept { return pruned_; }
    [[nodiscard]] const std::vector<WordIndex>& surviving() const noexcept { return surviving_; }

private:
    PruneSet() = default;
    std::vector<WordIndex> pruned_;
    std::vector<WordIndex> surviving_;
};

/// Surviving neighbors of l that receive mass: walk l's extended list and take
/// the first min(m, |active| - 1) words that are still active.
[[nodiscard]] std::vector<WordIndex> active_neighbors(const NeighborTable& table, WordIndex l,
                                                     std::span<const WordIndex> active);

/// Heuristic transfer: each surviving neighbor gains f_l / |N_delta(l)|.
[[nodiscard]] Representation psi_heuristic(const Representation& rep, WordIndex l, const NeighborTable& table);

/// Transfer with explicit weights: psi_k = f_k + Lambda_{k,l} f_l.
[[nodiscard]] Representation psi_exact(const Representation& rep, WordIndex l, const TransitionWeights& weights);

/// Isotropic Gaussian p(x | c_l) = N(mean, sigma^2 I).
struct GaussianConditional {
    std::vector<double> mean;
    double sigma = 1.0;
};

/// Monte-Carlo estimate of Lambda_{.,l}: sample from the conditional, keep
/// samples whose nearest active word is l, and record which active word
/// becomes nearest once l is gone. `active` restricts the codebook (empty =
/// every word). Deterministic in `seed` and independent of the thread count.
[[nodiscard]] TransitionWeights estimate_lambda(const Codebook& codebook, WordIndex l,
                                                const GaussianConditional& conditional,
                                                std::uint64_t samples, std::uint64_t seed,
                                                std::span<const WordIndex> active = {});

enum class PruneOrder { ascending, descending, shuffled };

struct HardPruneOptions {
    PruneOrder order = PruneOrder::ascending;
    std::uint64_t seed = 0; ///< used by PruneOrder::shuffled
};

/// Sequential psi_heuristic over S for every row.
[[nodiscard]] RepresentationMatrix prune_hard(const RepresentationMatrix& reps, const PruneSet& prune,
                                              const NeighborTable& table, const HardPruneOptions& options = {});

/// One weight table per pruned word, applied in the given order.
[[nodiscard]] RepresentationMatrix prune_hard_exact(const RepresentationMatrix& reps,
                                                    std::span<const WordIndex> order,
                                                    std::span<const TransitionWeights> weights);

/// upsilon_k = (1/N) sum_i h_ik / sum_{j in T} h_ij, per image.
[[nodiscard]] RepresentationMatrix prune_soft(const CodingMatrix& coding, const PruneSet& prune);

struct DiscardResult {
    RepresentationMatrix representations;
    std::vector<std::size_t> flagged_rows; ///< rows with no mass left, set to uniform
};

/// Drop the bins in S and renormalize each row (no mass transfer).
[[nodiscard]] DiscardResult discard_baseline(const RepresentationMatrix& reps, const PruneSet& prune);

} // namespace wordprune

#pragma once

// Synthetic experiments under an isotropic Gaussian mixture that check
// the transfer maps against brute-force re-coding.
//
// The codebook in these experiments is the set of mixture means, so the
// generative assumptions behind the transfer weights hold exactly.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wordprune/core.hpp"
#include "wordprune/pruning.hpp"

namespace wordprune {

struct SyntheticMixture {
    Matrix means;                 ///< K x d component means
    double sigma = 1.0;           ///< shared isotropic standard deviation
    std::vector<double> priors;   ///< component priors (uniform if empty)
    /// Optional per-class component weights (planted problems). When empty a
    /// single class "c0" draws from `priors`.
    std::vector<std::string> classes;
    std::vector<std::vector<double>> class_weights;

    void validate() const;
    [[nodiscard]] std::size_t components() const noexcept { return means.rows(); }
    [[nodiscard]] std::vector<double> effective_priors() const;
    [[nodiscard]] GaussianConditional conditional(WordIndex k) const;
    [[nodiscard]] Codebook codebook() const;
};

/// imagesPerClass images per class, N descriptors each, drawn i.i.d. from the
/// class's component weights. Image ids are "<class>_<n>".
[[nodiscard]] DescriptorCorpus sample_corpus(const SyntheticMixture& mixture, std::size_t images_per_class,
                                             std::size_t descriptors, std::uint64_t seed);

/// N descriptors drawn from one component only.
[[nodiscard]] Matrix sample_component(const SyntheticMixture& mixture, WordIndex k, std::size_t count,
                                      std::uint64_t seed);

struct TransferCheckConfig {
    WordIndex pruned = 1;
    std::size_t descriptors = 10000;    ///< N per trial
    std::size_t trials = 200;           ///< M
    std::uint64_t lambda_samples = 1000000;
    std::uint64_t seed = 0;
    double tolerance_se = 5.0;          ///< allowed gap in Monte-Carlo standard errors
};

struct TransferCheckBin {
    WordIndex word = 0;
    double lambda = 0.0;
    double mean_full = 0.0;      ///< mean f_k over trials
    double mean_oracle = 0.0;    ///< mean re-coded pruned bin
    double mean_psi = 0.0;       ///< psi_k(mean f, l)
    double gap = 0.0;
    double standard_error = 0.0; ///< trial error plus Lambda estimation error
    bool pass = false;
    double var_empirical = 0.0;  ///< var(f_pruned_k - psi_k(f)) over trials
    double var_predicted = 0.0;  ///< mean |S1| Lambda (1 - Lambda) / N^2
};

struct TransferCheckTrial {
    std::size_t trial = 0;
    std::size_t in_cell = 0;        ///< |S1|
    std::vector<double> full;       ///< f over all K words
    std::vector<double> oracle;     ///< re-coded pruned representation over T
};

struct TransferCheckReport {
    TransferCheckConfig config;
    TransitionWeights lambda;
    std::vector<WordIndex> surviving;
    std::vector<TransferCheckBin> bins;
    std::vector<TransferCheckTrial> trials;
    double mean_in_cell = 0.0;
    double max_gap = 0.0;
    double max_gap_in_se = 0.0;
    bool pass = false;
};

/// Expectation check: descriptors i.i.d. from the pruned word's conditional,
/// oracle re-coding on the pruned codebook vs psi_exact with estimated Lambda.
[[nodiscard]] TransferCheckReport verify_expected_transfer(const SyntheticMixture& mixture, const TransferCheckConfig& config);

struct VarianceConfig {
    WordIndex pruned = 1;
    std::size_t descriptors = 10000;
    std::size_t trials = 1000;
    std::uint64_t lambda_samples = 1000000;
    std::uint64_t seed = 0;
    double min_lambda = 0.05;     ///< bins below this are reported but not judged
    double ratio_low = 0.8;
    double ratio_high = 1.25;
};

struct VarianceBin {
    WordIndex word = 0;
    double lambda = 0.0;
    double var_empirical = 0.0;
    double var_predicted = 0.0;
    double ratio = 0.0;
    bool judged = false;
    bool pass = true;
};

struct VarianceReport {
    VarianceConfig config;
    std::size_t in_cell = 0;      ///< |S1|, held fixed across trials
    TransitionWeights lambda;
    std::vector<VarianceBin> bins;
    bool pass = false;
};

/// Variance check with the feature partition held fixed: every trial redraws
/// the |S1| descriptors of the pruned cell and re-codes them.
[[nodiscard]] VarianceReport verify_variance(const SyntheticMixture& mixture, const VarianceConfig& config);

struct HeuristicGapRow {
    double sigma = 0.0;
    std::size_t m = 0;
    std::vector<WordIndex> words;
    std::vector<double> gap;     ///< |psi_heuristic - psi_exact| per surviving word
    double max_gap = 0.0;
    double mean_gap = 0.0;
};

/// Report-only table of heuristic vs exact transfer for each (sigma, m). The
/// representation defaults to uniform mass over the codebook.
[[nodiscard]] std::vector<HeuristicGapRow> heuristic_gap(const SyntheticMixture& mixture, WordIndex pruned,
                                                         std::span<const double> sigmas,
                                                         std::span<const std::size_t> ms,
                                                         std::uint64_t lambda_samples, std::uint64_t seed,
                                                         const std::vector<double>& representation = {});

struct SoftExactnessConfig {
    std::size_t instances = 50;
    std::size_t min_words = 10;
    std::size_t max_words = 100;
    std::uint64_t seed = 0;
    double tolerance = 1e-10;
};

struct SoftExactnessInstance {
    std::size_t words = 0;
    std::size_t pruned = 0;
    std::size_t dim = 0;
    double softness = 0.0;
    double max_error = 0.0;
    std::uint64_t oracle_distance_evaluations = 0;
    std::uint64_t pruning_distance_evaluations = 0;
};

struct SoftExactnessReport {
    SoftExactnessConfig config;
    std::vector<SoftExactnessInstance> instances;
    double max_error = 0.0;
    bool pass = false;
};

/// Random soft-coded corpora and prune sets: prune_soft vs re-code + re-pool.
[[nodiscard]] SoftExactnessReport verify_soft_exactness(const SoftExactnessConfig& config);

/// Max |difference| between ascending-order hard pruning and `orders`
/// random orders of the same prune set.
[[nodiscard]] double prune_order_deviation(const RepresentationMatrix& reps, const PruneSet& prune,
                                           const NeighborTable& table, std::size_t orders, std::uint64_t seed);

} // namespace wordprune

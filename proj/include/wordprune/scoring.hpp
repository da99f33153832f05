#pragma once

// Maximum-relevance energy: per-bin Beta fits, differential entropy,
// mutual information with the class label.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wordprune/core.hpp"

namespace wordprune {

/// Samples are clamped to [eps, 1 - eps] before fitting.
inline constexpr double beta_clamp_epsilon = 1e-6;

struct BetaFit {
    double alpha = 1.0;
    double beta = 1.0;
    std::size_t samples = 0;
    std::size_t clamped = 0;     ///< samples moved by the clamp
    bool converged = true;       ///< false: Newton failed, method-of-moments values kept
    std::size_t iterations = 0;

    /// Throws unless both shapes are positive and finite.
    static BetaFit make(double alpha, double beta, std::size_t samples = 0);
};

enum class BetaFitMethod { maximum_likelihood, moments };

/// ML fit via Newton on the digamma score equations, started at the moment
/// estimate. Throws (numerical) when the clamped samples have zero variance.
[[nodiscard]] BetaFit fit_beta(std::span<const double> samples,
                               BetaFitMethod method = BetaFitMethod::maximum_likelihood);

/// Differential entropy in nats:
/// ln B(a,b) - (a-1) psi(a) - (b-1) psi(b) + (a+b-2) psi(a+b).
[[nodiscard]] double beta_entropy(const BetaFit& fit);

/// Differential entropy of sum_c w_c Beta(a_c, b_c) by adaptive quadrature,
/// split at each component's bulk so narrow peaks are resolved.
[[nodiscard]] double beta_mixture_entropy(std::span<const BetaFit> fits, std::span<const double> weights);

/// Density used for h(f) in the mutual information.
enum class MarginalModel {
    class_mixture, ///< prior-weighted mixture of the per-class Beta fits
    beta_fit,      ///< a single Beta fitted to the pooled values
};

struct MutualInformation {
    double value = 0.0;          ///< beta_fit marginal: may be negative (estimator noise); not clipped
    bool degenerate = false;     ///< some fit degenerate: value forced to 0
    BetaFit marginal;
    std::vector<BetaFit> per_class; ///< indexed like the class list
};

/// I(f; y) = h(f) - sum_y p(y) h(f | y) with Beta class conditionals and
/// empirical p(y). `class_of[i]` is the class position of sample i in
/// [0, num_classes). With `class_mixture` the estimate is never negative.
[[nodiscard]] MutualInformation mutual_information(std::span<const double> values,
                                                   std::span<const std::size_t> class_of,
                                                   std::size_t num_classes,
                                                   MarginalModel marginal = MarginalModel::class_mixture);

[[nodiscard]] MutualInformation mutual_information(std::span<const double> values,
                                                   std::span<const std::string> labels,
                                                   MarginalModel marginal = MarginalModel::class_mixture);

struct ScoreReport {
    std::vector<WordIndex> words;
    std::vector<double> per_bin;        ///< I(f_k; y) per active word
    std::vector<bool> degenerate;       ///< per bin
    std::vector<std::string> classes;   ///< sorted class labels
    std::vector<double> class_priors;   ///< empirical, same order as `classes`
    std::vector<BetaFit> marginal_fits;
    std::vector<std::vector<BetaFit>> class_fits; ///< [bin][class]
    double score = 0.0;                 ///< D(T, y): mean of per_bin
    std::size_t degenerate_bins = 0;
    std::size_t clamped_values = 0;
};

/// D(T, y) over every active word of the matrix. Needs >= 2 classes.
[[nodiscard]] ScoreReport max_relevance(const RepresentationMatrix& reps,
                                        MarginalModel marginal = MarginalModel::class_mixture);

[[nodiscard]] std::string to_string(MarginalModel m);
[[nodiscard]] MarginalModel parse_marginal_model(const std::string& name);

} // namespace wordprune

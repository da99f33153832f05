#pragma once

// One-vs-rest linear hinge-loss classifier used to score pruned
// codebooks by macro-averaged accuracy.

#include <cstdint>
#include <string>
#include <vector>

#include "wordprune/core.hpp"

namespace wordprune {

struct LinearModel {
    std::vector<std::string> classes;       ///< sorted
    std::vector<WordIndex> active_words;    ///< feature order the model expects
    std::vector<double> feature_mean;       ///< standardization applied before the weights
    std::vector<double> feature_scale;
    std::vector<std::vector<double>> weights; ///< [class][feature]
    std::vector<double> bias;
    double regularization = 1.0;            ///< C
    std::size_t epochs = 50;
    std::uint64_t seed = 0;

    [[nodiscard]] std::vector<double> decision(std::span<const double> features) const;
    [[nodiscard]] std::size_t predict(std::span<const double> features) const;
};

struct TrainOptions {
    double regularization = 1.0; ///< C; the L2 penalty is 1/(2C) ||w||^2 against the mean hinge loss
    std::size_t epochs = 50;
    std::uint64_t seed = 0;
};

/// Full-batch subgradient descent on the mean hinge loss per class. Each epoch
/// is one step over the whole training set, so the result does not depend on
/// row order and duplicating every row leaves the decision function unchanged.
[[nodiscard]] LinearModel train_linear(const RepresentationMatrix& train, const TrainOptions& options = {});

struct Evaluation {
    std::vector<std::string> classes;
    std::vector<double> per_class_accuracy;
    std::vector<std::size_t> per_class_count;
    double macro_accuracy = 0.0;
    std::vector<std::size_t> predictions;  ///< class position per test row
};

/// Macro-averaged accuracy (mean of per-class accuracies over the classes
/// present in the test set).
[[nodiscard]] Evaluation evaluate(const LinearModel& model, const RepresentationMatrix& test);

} // namespace wordprune

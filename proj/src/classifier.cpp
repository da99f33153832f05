#include "wordprune/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wordprune/parallel.hpp"

namespace wordprune {

std::vector<double> LinearModel::decision(std::span<const double> features) const {
    if (features.size() != feature_mean.size()) {
        fail_data("classifier expects " + std::to_string(feature_mean.size()) + " features, got " +
                  std::to_string(features.size()));
    }
    std::vector<double> out(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        double s = bias[c];
        for (std::size_t j = 0; j < features.size(); ++j) {
            s += weights[c][j] * (features[j] - feature_mean[j]) / feature_scale[j];
        }
        out[c] = s;
    }
    return out;
}

std::size_t LinearModel::predict(std::span<const double> features) const {
    const auto d = decision(features);
    return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

LinearModel train_linear(const RepresentationMatrix& train, const TrainOptions& options) {
    if (!(options.regularization > 0.0)) fail_usage("regularization C must be positive");
    if (options.epochs == 0) fail_usage("training needs at least one epoch");
    std::map<std::string, std::size_t> pos;
    for (const auto& l : train.labels()) pos.emplace(l, 0);
    if (pos.size() < 2) fail_data("training a classifier needs at least 2 classes");

    LinearModel model;
    model.regularization = options.regularization;
    model.epochs = options.epochs;
    model.seed = options.seed;
    model.active_words = train.active_words();
    std::size_t next = 0;
    for (auto& [name, p] : pos) {
        p = next++;
        model.classes.push_back(name);
    }

    const std::size_t n = train.size();
    const std::size_t d = train.active_words().size();
    const Matrix& X = train.values();
    model.feature_mean.assign(d, 0.0);
    model.feature_scale.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) model.feature_mean[j] += X(i, j) / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double v = X(i, j) - model.feature_mean[j];
            model.feature_scale[j] += v * v / static_cast<double>(n);
        }
    }
    for (double& s : model.feature_scale) s = s > 0.0 ? std::sqrt(s) : 1.0;

    Matrix Z(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) Z(i, j) = (X(i, j) - model.feature_mean[j]) / model.feature_scale[j];
        Z(i, d) = 1.0; // bias feature, regularized with the weights
    }
    std::vector<std::size_t> class_of(n);
    for (std::size_t i = 0; i < n; ++i) class_of[i] = pos.at(train.labels()[i]);

    const double lambda = 1.0 / options.regularization;
    const std::size_t C = model.classes.size();
    model.weights.assign(C, {});
    model.bias.assign(C, 0.0);
    parallel_for(C, [&](std::size_t c) {
        std::vector<double> w(d + 1, 0.0), avg(d + 1, 0.0), grad(d + 1);
        std::size_t averaged = 0;
        for (std::size_t t = 1; t <= options.epochs; ++t) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double y = class_of[i] == c ? 1.0 : -1.0;
                auto z = Z.row(i);
                double margin = 0.0;
                for (std::size_t j = 0; j <= d; ++j) margin += w[j] * z[j];
                if (y * margin < 1.0) {
                    for (std::size_t j = 0; j <= d; ++j) grad[j] -= y * z[j];
                }
            }
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            for (std::size_t j = 0; j <= d; ++j) {
                w[j] -= eta * (lambda * w[j] + grad[j] / static_cast<double>(n));
            }
            // suffix average over the second half of the run
            if (2 * t > options.epochs) {
                ++averaged;
                for (std::size_t j = 0; j <= d; ++j) avg[j] += (w[j] - avg[j]) / static_cast<double>(averaged);
            }
        }
        model.weights[c].assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(d));
        model.bias[c] = avg[d];
    });
    return model;
}

Evaluation evaluate(const LinearModel& model, const RepresentationMatrix& test) {
    if (test.size() == 0) fail_data("evaluation needs a non-empty test set");
    if (test.active_words() != model.active_words) fail_data("test features do not match the model's active words");
    Evaluation ev;
    ev.classes = model.classes;
    ev.per_class_accuracy.assign(model.classes.size(), 0.0);
    ev.per_class_count.assign(model.classes.size(), 0);
    ev.predictions.resize(test.size());
    parallel_for(test.size(), [&](std::size_t i) { ev.predictions[i] = model.predict(test.values().row(i)); });

    std::vector<std::size_t> correct(model.classes.size(), 0);
    for (std::size_t i = 0; i < test.size(); ++i) {
        auto it = std::lower_bound(model.classes.begin(), model.classes.end(), test.labels()[i]);
        if (it == model.classes.end() || *it != test.labels()[i]) {
            fail_data("test label '" + test.labels()[i] + "' was not seen in training");
        }
        const auto c = static_cast<std::size_t>(it - model.classes.begin());
        ++ev.per_class_count[c];
        if (ev.predictions[i] == c) ++correct[c];
    }
    std::size_t present = 0;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        if (ev.per_class_count[c] == 0) continue;
        ev.per_class_accuracy[c] = static_cast<double>(correct[c]) / static_cast<double>(ev.per_class_count[c]);
        ev.macro_accuracy += ev.per_class_accuracy[c];
        ++present;
    }
    ev.macro_accuracy /= static_cast<double>(present);
    return ev;
}

} // namespace wordprune

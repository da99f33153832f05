#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "wordprune/classifier.hpp"

using namespace wordprune;

namespace {

RepresentationMatrix two_blobs(std::size_t n, std::uint64_t seed, bool shuffle_labels) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 0.3);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const bool a = i % 2 == 0;
        const double x = a ? 0.1 + u(rng) : 0.6 + u(rng);
        rows.push_back({x, 1 - x});
        labels.push_back(a ? "a" : "b");
    }
    if (shuffle_labels) std::shuffle(labels.begin(), labels.end(), rng);
    return testutil::reps(rows, labels);
}

} // namespace

TEST_CASE("separable classes are learned exactly") {
    auto train = two_blobs(60, 1, false);
    auto model = train_linear(train);
    CHECK(evaluate(model, train).macro_accuracy == 1.0);
    CHECK(evaluate(model, two_blobs(40, 2, false)).macro_accuracy == 1.0);
}

TEST_CASE("shuffled labels give chance accuracy") {
    // Random features carry no label information.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u;
    auto make = [&](std::size_t n) {
        std::vector<std::vector<double>> rows;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> r(8);
            double s = 0;
            for (double& v : r) s += (v = u(rng));
            for (double& v : r) v /= s;
            rows.push_back(r);
            labels.push_back(i % 2 ? "a" : "b");
        }
        std::shuffle(labels.begin(), labels.end(), rng);
        return testutil::reps(rows, labels);
    };
    auto model = train_linear(make(400));
    const double acc = evaluate(model, make(4000)).macro_accuracy;
    CHECK(acc > 0.45);
    CHECK(acc < 0.55);
}

TEST_CASE("duplicated training rows leave the model unchanged") {
    auto train = two_blobs(30, 4, true);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int rep = 0; rep < 2; ++rep) {
        for (std::size_t i = 0; i < train.size(); ++i) {
            auto r = train.values().row(i);
            rows.emplace_back(r.begin(), r.end());
            labels.push_back(train.labels()[i]);
        }
    }
    auto a = train_linear(train);
    auto b = train_linear(testutil::reps(rows, labels));
    for (std::size_t c = 0; c < a.weights.size(); ++c) {
        for (std::size_t j = 0; j < a.weights[c].size(); ++j) CHECK(a.weights[c][j] == doctest::Approx(b.weights[c][j]).epsilon(1e-12));
        CHECK(a.bias[c] == doctest::Approx(b.bias[c]).epsilon(1e-12));
    }
}

TEST_CASE("same options give the same model") {
    auto train = two_blobs(50, 5, true);
    auto a = train_linear(train, {1.0, 50, 7});
    auto b = train_linear(train, {1.0, 50, 7});
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
}

TEST_CASE("evaluation") {
    auto train = two_blobs(20, 6, false);
    auto model = train_linear(train);

    SUBCASE("constant predictor on balanced classes") {
        LinearModel constant = model;
        for (auto& w : constant.weights) std::fill(w.begin(), w.end(), 0.0);
        constant.bias = {1.0, 0.0};
        auto ev = evaluate(constant, train);
        CHECK(ev.per_class_accuracy[0] == 1.0);
        CHECK(ev.per_class_accuracy[1] == 0.0);
        CHECK(ev.macro_accuracy == 0.5);
    }
    SUBCASE("empty test set") {
        Matrix none(0, 2);
        auto empty = RepresentationMatrix::make(none, {1, 2}, {}, {});
        CHECK_THROWS_AS((void)evaluate(model, empty), Error);
    }
    SUBCASE("feature mismatch") {
        auto other = testutil::reps({{0.2, 0.3, 0.5}}, {"a"});
        CHECK_THROWS_AS((void)evaluate(model, other), Error);
    }
    SUBCASE("single class training is rejected") {
        CHECK_THROWS_AS((void)train_linear(testutil::reps({{0.5, 0.5}, {0.4, 0.6}})), Error);
    }
}

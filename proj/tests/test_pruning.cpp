#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "wordprune/codebook_builder.hpp"
#include "wordprune/coding.hpp"
#include "wordprune/distance.hpp"
#include "wordprune/pruning.hpp"

using namespace wordprune;
using testutil::codebook;
using testutil::iota_words;

namespace {

Representation rep(std::vector<double> v) {
    const auto n = v.size();
    return Representation::make(std::move(v), iota_words(n));
}

// Table where every word lists the others in the given order.
NeighborTable table_of(std::size_t m, std::vector<std::vector<WordIndex>> lists) {
    return NeighborTable(m, std::move(lists));
}

double mc_sigma(double p, std::uint64_t n) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); }

} // namespace

TEST_CASE("psi heuristic examples") {
    auto t = table_of(2, {{2, 3}, {1, 3}, {1, 2}});
    auto out = psi_heuristic(rep({0.2, 0.3, 0.5}), 3, t);
    CHECK(out.active_words() == std::vector<WordIndex>{1, 2});
    CHECK(out.values()[0] == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(out.values()[1] == doctest::Approx(0.55).epsilon(1e-15));

    auto zero = psi_heuristic(rep({0.4, 0.6, 0.0}), 3, t);
    CHECK(zero.values() == std::vector<double>{0.4, 0.6});

    std::vector<std::vector<WordIndex>> six;
    for (WordIndex l = 1; l <= 6; ++l) {
        std::vector<WordIndex> others;
        for (WordIndex k = 1; k <= 6; ++k) {
            if (k != l) others.push_back(k);
        }
        six.push_back(others);
    }
    auto five = psi_heuristic(rep({0.95, 0.01, 0.01, 0.01, 0.01, 0.01}), 1, table_of(5, six));
    REQUIRE(five.size() == 5);
    for (double v : five.values()) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));

    CHECK_THROWS_AS((void)psi_heuristic(Representation::make({0.5, 0.5}, {1, 3}), 2, t), Error);
}

TEST_CASE("psi exact examples") {
    TransitionWeights all{2, {{1, 1.0}}};
    auto one = psi_exact(Representation::make({0.4, 0.6}, {1, 2}), 2, all);
    CHECK(one.values() == std::vector<double>{1.0});

    TransitionWeights w{3, {{1, 0.25}, {2, 0.75}}};
    auto out = psi_exact(rep({0.2, 0.3, 0.5}), 3, w);
    CHECK(out.values()[0] == doctest::Approx(0.325).epsilon(1e-15));
    CHECK(out.values()[1] == doctest::Approx(0.675).epsilon(1e-15));

    TransitionWeights uniform{3, {{1, 0.5}, {2, 0.5}}};
    auto t = table_of(2, {{2, 3}, {1, 3}, {1, 2}});
    CHECK(psi_exact(rep({0.2, 0.3, 0.5}), 3, uniform).values() == psi_heuristic(rep({0.2, 0.3, 0.5}), 3, t).values());

    TransitionWeights bad_sum{3, {{1, 0.5}, {2, 0.4}}};
    CHECK_THROWS_AS((void)psi_exact(rep({0.2, 0.3, 0.5}), 3, bad_sum), Error);
    TransitionWeights self{3, {{1, 0.5}, {3, 0.5}}};
    CHECK_THROWS_AS((void)psi_exact(rep({0.2, 0.3, 0.5}), 3, self), Error);
}

TEST_CASE("lambda estimation: symmetric codebooks") {
    const std::uint64_t n = 200000;
    SUBCASE("1-D mirror") {
        auto cb = codebook({{-1}, {0}, {1}});
        for (double sigma : {0.2, 1.0}) {
            auto w = estimate_lambda(cb, 2, {{0.0}, sigma}, n, 17);
            CHECK(std::abs(w.weight(1) - 0.5) < 3 * mc_sigma(0.5, w.kept_samples));
            CHECK(std::abs(w.weight(3) - 0.5) < 3 * mc_sigma(0.5, w.kept_samples));
        }
    }
    SUBCASE("equilateral triangle") {
        auto cb = codebook({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
        auto w = estimate_lambda(cb, 3, {{0.5, std::sqrt(3.0) / 2}, 0.3}, n, 4);
        CHECK(std::abs(w.weight(1) - 0.5) < 3 * mc_sigma(0.5, w.kept_samples));
        CHECK(std::abs(w.weight(2) - 0.5) < 3 * mc_sigma(0.5, w.kept_samples));
    }
}

TEST_CASE("lambda estimation against independent integration") {
    const std::uint64_t n = 400000;
    SUBCASE("[0, 1, 10], sigma 0.1") {
        const std::vector<double> c{0, 1, 10};
        auto exact = oracle::lambda_1d(c, 1, 1.0, 0.1);
        CHECK(exact[0] > 0.999);
        auto w = estimate_lambda(codebook({{0}, {1}, {10}}), 2, {{1.0}, 0.1}, n, 8);
        CHECK(std::abs(w.weight(1) - exact[0]) < 3 * mc_sigma(exact[0], w.kept_samples) + 1e-12);
        CHECK(std::abs(w.weight(3) - exact[2]) < 3 * mc_sigma(exact[2], w.kept_samples) + 1e-12);
    }
    SUBCASE("[0, 1, 3], sigma 1 (unequal split)") {
        const std::vector<double> c{0, 1, 3};
        auto exact = oracle::lambda_1d(c, 1, 1.0, 1.0);
        CHECK(exact[0] > 0.55);
        auto w = estimate_lambda(codebook({{0}, {1}, {3}}), 2, {{1.0}, 1.0}, n, 21);
        CHECK(std::abs(w.weight(1) - exact[0]) < 3 * mc_sigma(exact[0], w.kept_samples));
        CHECK(std::abs(w.weight(3) - exact[2]) < 3 * mc_sigma(exact[2], w.kept_samples));
    }
    SUBCASE("2-D, four words, grid oracle") {
        std::vector<std::array<double, 2>> c{{0, 0}, {1.2, 0.1}, {-0.3, 1.0}, {0.8, -0.9}};
        auto exact = oracle::lambda_2d_grid(c, 0, {0, 0}, 0.5, 1200);
        auto w = estimate_lambda(codebook({{0, 0}, {1.2, 0.1}, {-0.3, 1.0}, {0.8, -0.9}}), 1, {{0, 0}, 0.5}, n, 2);
        for (WordIndex k = 2; k <= 4; ++k) {
            CHECK(std::abs(w.weight(k) - exact[k - 1]) < 3 * mc_sigma(exact[k - 1], w.kept_samples) + 2e-3);
        }
    }
}

TEST_CASE("lambda estimation is deterministic, thread-independent, and reports empty cells") {
    auto cb = codebook({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    auto a = estimate_lambda(cb, 1, {{0, 0}, 0.4}, 100000, 99);
    auto b = estimate_lambda(cb, 1, {{0, 0}, 0.4}, 100000, 99);
    CHECK(a.weights == b.weights);
    a.validate();
    CHECK_THROWS_AS((void)estimate_lambda(codebook({{0}, {1}}), 1, {{50.0}, 1e-3}, 1000, 1), Error);
    CHECK_THROWS_AS((void)estimate_lambda(cb, 1, {{0, 0}, 0.0}, 10, 1), Error);
}

TEST_CASE("prune_hard") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    Matrix cents(10, 2);
    for (double& v : cents.data()) v = g(rng);
    auto cb = Codebook::from_centroids(cents);
    auto table = build_neighbor_table(cb, 3, 9);

    std::vector<std::vector<double>> rows;
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> r(10);
        double s = 0;
        for (double& v : r) s += (v = u(rng));
        for (double& v : r) v /= s;
        rows.push_back(r);
    }
    auto R = testutil::reps(rows);

    SUBCASE("empty prune set is the identity") {
        auto out = prune_hard(R, PruneSet::make(R.active_words(), {}), table);
        CHECK(out.values() == R.values());
    }
    SUBCASE("single survivor gets everything") {
        std::vector<WordIndex> s{1, 2, 3, 4, 5, 6, 8, 9, 10};
        auto out = prune_hard(R, PruneSet::make(R.active_words(), s), table);
        CHECK(out.active_words() == std::vector<WordIndex>{7});
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.values()(i, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("mass conserved, no distance evaluations") {
        DistanceCountScope scope;
        auto out = prune_hard(R, PruneSet::make(R.active_words(), std::vector<WordIndex>{2, 5, 9}), table);
        CHECK(scope.evaluations() == 0);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out.row(i).sum() - 1.0) < 1e-9);
    }
    SUBCASE("matches sequential psi_heuristic") {
        const std::vector<WordIndex> s{3, 4, 8};
        auto out = prune_hard(R, PruneSet::make(R.active_words(), s), table);
        for (std::size_t i = 0; i < R.size(); ++i) {
            Representation r = R.row(i);
            for (WordIndex l : s) r = psi_heuristic(r, l, table);
            for (std::size_t k = 0; k < r.size(); ++k) CHECK(out.values()(i, k) == doctest::Approx(r.values()[k]).epsilon(1e-14));
        }
    }
    SUBCASE("a shallow table is reported") {
        auto shallow = build_neighbor_table(cb, 1, 1);
        std::vector<WordIndex> s{1, 2, 3, 4, 5, 6, 7, 8};
        CHECK_THROWS_AS((void)prune_hard(R, PruneSet::make(R.active_words(), s), shallow), Error);
    }
}

TEST_CASE("prune_soft equals re-coding on the surviving codebook") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    Matrix cents(12, 3);
    for (double& v : cents.data()) v = g(rng);
    auto cb = Codebook::from_centroids(cents);
    std::vector<Image> images;
    for (int m = 0; m < 4; ++m) {
        Matrix d(15, 3);
        for (double& v : d.data()) v = 1.5 * g(rng);
        images.push_back({"i" + std::to_string(m), m % 2 ? "a" : "b", d});
    }
    auto corpus = DescriptorCorpus::validate(3, {"a", "b"}, images);
    auto enc = encode_corpus(corpus, cb, {Scheme::soft, 0.8, true});
    const auto all = cb.index_set();

    SUBCASE("empty prune set") {
        auto out = prune_soft(*enc.coding, PruneSet::make(all, {}));
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t k = 0; k < 12; ++k) CHECK(std::abs(out.values()(i, k) - enc.representations.values()(i, k)) < 1e-15);
        }
    }
    SUBCASE("one survivor") {
        auto out = prune_soft(*enc.coding, PruneSet::keep(all, std::vector<WordIndex>{5}));
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.values()(i, 0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("random prune sets") {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<WordIndex> keep;
            std::bernoulli_distribution coin(0.5);
            for (WordIndex w : all) {
                if (coin(rng)) keep.push_back(w);
            }
            if (keep.empty()) keep.push_back(1);
            DistanceCountScope scope;
            auto fast = prune_soft(*enc.coding, PruneSet::keep(all, keep));
            CHECK(scope.evaluations() == 0);
            auto slow = encode_corpus(corpus, cb.restrict(keep), {Scheme::soft, 0.8, false});
            for (std::size_t i = 0; i < fast.size(); ++i) {
                for (std::size_t k = 0; k < keep.size(); ++k) {
                    CHECK(std::abs(fast.values()(i, k) - slow.representations.values()(i, k)) <= 1e-10);
                }
            }
        }
    }
    SUBCASE("hard coding is rejected") {
        auto hard = encode_corpus(corpus, cb, {Scheme::hard, 0.0, true});
        CHECK_THROWS_AS((void)prune_soft(*hard.coding, PruneSet::make(all, std::vector<WordIndex>{1})), Error);
    }
}

TEST_CASE("discard baseline") {
    auto R = testutil::reps({{0.2, 0.3, 0.5}, {0.0, 0.0, 1.0}});
    auto out = discard_baseline(R, PruneSet::make(R.active_words(), std::vector<WordIndex>{3}));
    CHECK(out.representations.values()(0, 0) == doctest::Approx(0.4));
    CHECK(out.representations.values()(0, 1) == doctest::Approx(0.6));
    CHECK(out.representations.values()(1, 0) == 0.5);
    CHECK(out.representations.values()(1, 1) == 0.5);
    CHECK(out.flagged_rows == std::vector<std::size_t>{1});
    auto same = discard_baseline(R, PruneSet::make(R.active_words(), {}));
    CHECK(same.representations.values() == R.values());
    CHECK(same.flagged_rows.empty());
}

TEST_CASE("prune set validation") {
    const std::vector<WordIndex> active{1, 2, 3};
    CHECK_THROWS_AS((void)PruneSet::make(active, std::vector<WordIndex>{1, 2, 3}), Error);
    CHECK_THROWS_AS((void)PruneSet::make(active, std::vector<WordIndex>{4}), Error);
    CHECK_THROWS_AS((void)PruneSet::make(active, std::vector<WordIndex>{2, 2}), Error);
    auto ps = PruneSet::make(active, std::vector<WordIndex>{3, 1});
    CHECK(ps.pruned() == std::vector<WordIndex>{1, 3});
    CHECK(ps.surviving() == std::vector<WordIndex>{2});
}

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Usage: acceptance [path-to-wordprune-cli] [scratch-dir]

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wordprune/classifier.hpp"
#include "wordprune/codebook_builder.hpp"
#include "wordprune/coding.hpp"
#include "wordprune/distance.hpp"
#include "wordprune/io.hpp"
#include "wordprune/pruning.hpp"
#include "wordprune/scoring.hpp"
#include "wordprune/selection.hpp"
#include "wordprune/validation.hpp"

using namespace wordprune;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<WordIndex> words(std::size_t K) {
    std::vector<WordIndex> w(K);
    for (std::size_t k = 0; k < K; ++k) w[k] = k + 1;
    return w;
}

std::vector<WordIndex> complement(std::span<const WordIndex> keep, std::size_t K) {
    std::vector<bool> in(K + 1, false);
    for (auto w : keep) in[w] = true;
    std::vector<WordIndex> out;
    for (WordIndex k = 1; k <= K; ++k) {
        if (!in[k]) out.push_back(k);
    }
    return out;
}

// 1. soft pruning equals re-coding on the smaller codebook
Outcome soft_exactness() {
    SoftExactnessConfig cfg;
    cfg.instances = 50;
    cfg.seed = 2024;
    auto r = verify_soft_exactness(cfg);
    std::uint64_t pruning_evals = 0;
    for (const auto& in : r.instances) pruning_evals += in.pruning_distance_evaluations;
    return {r.pass && r.instances.size() == 50 && pruning_evals == 0,
            fmt("50 instances, max |prune_soft - recode| = %.3g (tol 1e-10)", r.max_error)};
}

SyntheticMixture mixture_1d() {
    SyntheticMixture m;
    const std::vector<double> xs{-2.0, -0.8, 0.0, 1.1, 2.5};
    m.means = Matrix(xs.size(), 1);
    for (std::size_t k = 0; k < xs.size(); ++k) m.means(k, 0) = xs[k];
    m.sigma = 0.7;
    return m;
}

SyntheticMixture mixture_2d() {
    SyntheticMixture m;
    m.means = Matrix(9, 2);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (std::size_t k = 0; k < 9; ++k) {
        m.means(k, 0) = static_cast<double>(k % 3) + jitter(rng);
        m.means(k, 1) = static_cast<double>(k / 3) + jitter(rng);
    }
    m.sigma = 0.5;
    return m;
}

// 2. re-coded pruned bins match the exact transfer in expectation
Outcome expected_transfer() {
    bool pass = true;
    std::string detail;
    const std::array<std::pair<SyntheticMixture, WordIndex>, 2> cases{
        std::pair{mixture_1d(), WordIndex{3}}, std::pair{mixture_2d(), WordIndex{5}}};
    const char* names[] = {"1-D", "2-D"};
    for (std::size_t c = 0; c < cases.size(); ++c) {
        TransferCheckConfig cfg;
        cfg.pruned = cases[c].second;
        cfg.descriptors = 10000;
        cfg.trials = 200;
        cfg.lambda_samples = 1000000;
        cfg.seed = 100 + c;
        cfg.tolerance_se = 5.0;
        auto r = verify_expected_transfer(cases[c].first, cfg);
        pass = pass && r.pass;
        detail += fmt("%s max gap %.3g = %.2f SE; ", names[c], r.max_gap, r.max_gap_in_se);
    }
    detail += "(tol 5 SE, N=1e4, M=200, 1e6 Lambda samples)";
    return {pass, detail};
}

// 3. variance of the re-coded bins
Outcome variance_law() {
    bool pass = true;
    double lo = 1e300, hi = 0.0;
    std::size_t judged = 0;
    const std::array<std::pair<SyntheticMixture, WordIndex>, 2> cases{
        std::pair{mixture_1d(), WordIndex{3}}, std::pair{mixture_2d(), WordIndex{5}}};
    for (std::size_t c = 0; c < cases.size(); ++c) {
        VarianceConfig cfg;
        cfg.pruned = cases[c].second;
        cfg.descriptors = 10000;
        cfg.trials = 1000;
        cfg.seed = 300 + c;
        auto r = verify_variance(cases[c].first, cfg);
        pass = pass && r.pass;
        for (const auto& b : r.bins) {
            if (!b.judged) continue;
            ++judged;
            lo = std::min(lo, b.ratio);
            hi = std::max(hi, b.ratio);
        }
    }
    return {pass && judged > 0,
            fmt("%zu bins judged (1-D and 2-D), empirical/predicted ratio in [%.3f, %.3f] (allowed [0.8, 1.25], M=1000)",
                judged, lo, hi)};
}

// 4. every transfer step keeps the total mass
Outcome mass_conservation() {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> g;
    std::exponential_distribution<double> e;
    double worst = 0.0;
    std::size_t steps = 0;
    for (int inst = 0; inst < 10000; ++inst) {
        const std::size_t K = 3 + rng() % 28;
        const std::size_t d = 1 + rng() % 3;
        Matrix c(K, d);
        for (double& v : c.data()) v = g(rng);
        auto cb = Codebook::from_centroids(c);
        const std::size_t m = 1 + rng() % std::min<std::size_t>(5, K - 1);
        auto table = build_neighbor_table(cb, m, K - 1);

        std::vector<double> f(K);
        double s = 0.0;
        for (double& v : f) s += (v = rng() % 4 == 0 ? 0.0 : e(rng));
        if (s == 0.0) f[0] = s = 1.0;
        for (double& v : f) v /= s;
        auto rep = Representation::make(f, words(K));

        std::vector<WordIndex> order = words(K);
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t prune = 1 + rng() % (K - 1);
        order.resize(prune);

        auto h = rep;
        auto x = rep;
        for (auto l : order) {
            const double before = h.sum();
            h = psi_heuristic(h, l, table);
            worst = std::max(worst, std::abs(h.sum() - before));

            TransitionWeights tw;
            tw.pruned = l;
            double ws = 0.0;
            for (auto k : x.active_words()) {
                if (k == l || rng() % 2 == 0) continue;
                const double w = e(rng);
                tw.weights.emplace_back(k, w);
                ws += w;
            }
            if (tw.weights.empty()) {
                for (auto k : x.active_words()) {
                    if (k != l) {
                        tw.weights.emplace_back(k, 1.0);
                        ws = 1.0;
                        break;
                    }
                }
            }
            for (auto& [k, w] : tw.weights) w /= ws;
            const double xb = x.sum();
            x = psi_exact(x, l, tw);
            worst = std::max(worst, std::abs(x.sum() - xb));
            ++steps;
        }

        Matrix one(1, K);
        std::copy(f.begin(), f.end(), one.row(0).begin());
        auto rm = RepresentationMatrix::make(one, words(K), {"x"}, {"a"});
        auto ps = PruneSet::make(rm.active_words(), std::vector<WordIndex>(order.begin(), order.end()));
        auto pruned = prune_hard(rm, ps, table);
        double total = 0.0;
        for (double v : pruned.values().row(0)) total += v;
        worst = std::max(worst, std::abs(total - 1.0) / static_cast<double>(prune));
    }
    return {worst <= 1e-12, fmt("1e4 instances, %zu steps, worst |sum change| per step = %.3g (tol 1e-12)", steps, worst)};
}

// 5. closed-form Beta entropy vs quadrature
Outcome beta_entropy_check() {
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        for (double b : {0.5, 1.0, 2.0, 5.0, 10.0}) {
            worst = std::max(worst, std::abs(beta_entropy(BetaFit::make(a, b)) - oracle::beta_entropy(a, b)));
        }
    }
    const double uniform = std::abs(beta_entropy(BetaFit::make(1, 1)));
    return {worst <= 1e-6 && uniform <= 1e-12,
            fmt("25-point grid max error %.3g (tol 1e-6), |h(Beta(1,1))| = %.3g (tol 1e-12)", worst, uniform)};
}

std::vector<double> beta_samples(double a, double b, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    std::vector<double> out(n);
    for (double& v : out) {
        const double x = ga(rng), y = gb(rng);
        v = x / (x + y);
    }
    return out;
}

MutualInformation two_class_mi(std::array<double, 4> shapes, std::uint64_t seed, MarginalModel marginal) {
    const std::size_t n = 10000;
    auto v = beta_samples(shapes[0], shapes[1], n, seed);
    auto b = beta_samples(shapes[2], shapes[3], n, seed + 1);
    v.insert(v.end(), b.begin(), b.end());
    std::vector<std::size_t> cls(2 * n, 0);
    std::fill(cls.begin() + static_cast<std::ptrdiff_t>(n), cls.end(), 1);
    return mutual_information(v, cls, 2, marginal);
}

// 6. mutual information against quadrature ground truth
Outcome mi_calibration(std::string& info) {
    const auto same = two_class_mi({2, 5, 2, 5}, 600, MarginalModel::class_mixture);
    const auto sep = two_class_mi({2, 8, 8, 2}, 610, MarginalModel::class_mixture);
    const double truth = oracle::beta_mixture_mi({2, 8}, {8, 2}, {0.5, 0.5});
    const double rel = std::abs(sep.value - truth) / truth;
    const auto pooled = two_class_mi({2, 8, 8, 2}, 610, MarginalModel::beta_fit);
    info = fmt("single-Beta marginal on the separated pair: %.4f vs truth %.4f (%+.1f%%)", pooled.value, truth,
               100.0 * (pooled.value - truth) / truth);
    return {std::abs(same.value) <= 0.02 && rel <= 0.10,
            fmt("identical |I| = %.4f (tol 0.02); Beta(2,8)/Beta(8,2) I = %.4f vs %.4f, rel err %.3f (tol 0.10)",
                std::abs(same.value), sep.value, truth, rel)};
}

// Five discriminative words on a tight pentagon, noise words on five spokes
// leading away from it.
SyntheticMixture planted_mixture() {
    SyntheticMixture m;
    const std::size_t K = 50;
    m.means = Matrix(K, 2);
    const double r0 = 0.4, first_gap = 1.3, growth = 1.25;
    std::size_t k = 0;
    for (int s = 0; s < 5; ++s) {
        const double th = 2 * M_PI * s / 5 + 0.1;
        m.means(k, 0) = r0 * std::cos(th);
        m.means(k, 1) = r0 * std::sin(th);
        ++k;
    }
    for (int s = 0; s < 5; ++s) {
        const double th = 2 * M_PI * s / 5 + 0.1;
        double r = r0, gap = first_gap;
        for (int j = 0; j < 9; ++j, ++k) {
            r += gap;
            gap *= growth;
            m.means(k, 0) = r * std::cos(th);
            m.means(k, 1) = r * std::sin(th);
        }
    }
    m.sigma = 0.05;
    m.classes = {"a", "b"};
    std::vector<double> wa(K, 1.0), wb(K, 1.0);
    for (std::size_t p = 0; p < 5; ++p) {
        wa[p] = p % 2 == 0 ? 4.0 : 0.5;
        wb[p] = p % 2 == 0 ? 0.5 : 4.0;
    }
    for (auto* w : {&wa, &wb}) {
        double s = 0.0;
        for (double v : *w) s += v;
        for (double& v : *w) v /= s;
    }
    m.class_weights = {wa, wb};
    return m;
}

// 7. annealing recovers the planted subset
Outcome planted_recovery() {
    auto mix = planted_mixture();
    auto corpus = sample_corpus(mix, 30, 300, 7);
    auto cb = mix.codebook();
    auto enc = encode_corpus(corpus, cb, {});
    auto table = build_neighbor_table(cb, 5, cb.size() - 1);
    AnnealInputs in{&table, &enc.representations, nullptr};
    const std::vector<WordIndex> planted{1, 2, 3, 4, 5};
    auto energy = [&](std::vector<WordIndex> s) {
        std::sort(s.begin(), s.end());
        return max_relevance(representations_for(in, Scheme::hard, s)).score;
    };
    const double dp = energy(planted);
    std::mt19937_64 rng(77);
    double best_random = -1.0;
    std::size_t beaten = 0;
    for (int i = 0; i < 200; ++i) {
        auto all = words(cb.size());
        std::shuffle(all.begin(), all.end(), rng);
        const double d = energy({all.begin(), all.begin() + 5});
        best_random = std::max(best_random, d);
        if (d >= dp) ++beaten;
    }
    std::size_t hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        AnnealConfig cfg;
        cfg.target_size = 5;
        cfg.seed = seed;
        if (anneal(in, cfg).best_subset == planted) ++hits;
    }
    return {beaten == 0 && hits >= 8,
            fmt("D(planted) = %.4f, best of 200 random = %.4f; recovered %zu/10 (need 8, lambda 0.9, move 10, tmax 100)",
                dp, best_random, hits)};
}

// 8. distance evaluations
Outcome zero_recoding() {
    SyntheticMixture mix;
    std::mt19937_64 rng(808);
    std::normal_distribution<double> g;
    mix.means = Matrix(20, 3);
    for (double& v : mix.means.data()) v = 2.0 * g(rng);
    mix.sigma = 1.0;
    mix.classes = {"a", "b"};
    std::vector<double> wa(20, 0.05), wb(20, 0.05);
    wa[0] = wa[1] = 0.1;
    wa[18] = wa[19] = 0.0;
    wb[18] = wb[19] = 0.1;
    wb[0] = wb[1] = 0.0;
    mix.class_weights = {wa, wb};
    auto corpus = sample_corpus(mix, 10, 150, 9);
    auto cb = mix.codebook();
    auto table = build_neighbor_table(cb, 3, 19);
    auto hard = encode_corpus(corpus, cb, {Scheme::hard, 0.0, false});
    auto soft = encode_corpus(corpus, cb, {Scheme::soft, 0.5, true});

    const std::vector<WordIndex> keep{1, 2, 5, 8, 11, 19, 20};
    auto ps = PruneSet::keep(cb.index_set(), keep);
    std::uint64_t in_search = 0, in_hard = 0, in_soft = 0;
    {
        DistanceCountScope s;
        AnnealConfig cfg;
        cfg.target_size = 7;
        cfg.seed = 1;
        (void)anneal({&table, &hard.representations, nullptr}, cfg);
        cfg.scheme = Scheme::soft;
        cfg.tmax = 50;
        (void)anneal({&table, nullptr, &*soft.coding}, cfg);
        in_search = s.evaluations();
    }
    {
        DistanceCountScope s;
        (void)prune_hard(hard.representations, ps, table);
        in_hard = s.evaluations();
    }
    {
        DistanceCountScope s;
        (void)prune_soft(*soft.coding, ps);
        in_soft = s.evaluations();
    }
    bool oracle_ok = true;
    auto small = cb.restrict(keep);
    for (const auto& img : corpus.images()) {
        DistanceCountScope s;
        (void)hard_code(img, small);
        oracle_ok = oracle_ok && s.evaluations() == img.descriptors.rows() * keep.size();
    }
    return {in_search == 0 && in_hard == 0 && in_soft == 0 && oracle_ok,
            fmt("anneal %llu, prune_hard %llu, prune_soft %llu; re-coding oracle N*|T| per image: %s",
                static_cast<unsigned long long>(in_search), static_cast<unsigned long long>(in_hard),
                static_cast<unsigned long long>(in_soft), oracle_ok ? "exact" : "MISMATCH")};
}

struct AccuracyRow {
    double full = 0.0, pruned = 0.0, discard = 0.0;
};

AccuracyRow accuracy_run(std::uint64_t seed, std::size_t images_per_class, double boost) {
    const std::size_t C = 40, dim = 4, K = 200;
    std::mt19937_64 g(seed * 1000);
    std::uniform_real_distribution<double> u(0, 10);
    SyntheticMixture mix;
    mix.means = Matrix(C, dim);
    for (double& v : mix.means.data()) v = u(g);
    mix.sigma = 0.8;
    mix.classes = {"a", "b", "c", "d"};
    for (std::size_t c = 0; c < 4; ++c) {
        std::vector<double> w(C, 1.0);
        for (std::size_t k = c; k < C; k += 8) w[k] = boost;
        double s = 0.0;
        for (double v : w) s += v;
        for (double& v : w) v /= s;
        mix.class_weights.push_back(w);
    }
    auto train = sample_corpus(mix, images_per_class, 200, seed * 10 + 1);
    auto test = sample_corpus(mix, images_per_class, 200, seed * 10 + 2);
    auto cb = build_codebook(train, {K, seed});
    auto tr = encode_corpus(train, cb, {}).representations;
    auto te = encode_corpus(test, cb, {}).representations;
    auto table = build_neighbor_table(cb, 5, K - 1);
    AnnealConfig cfg;
    cfg.target_size = 30;
    cfg.seed = seed;
    auto best = anneal({&table, &tr, nullptr}, cfg).best_subset;
    auto ps = PruneSet::make(tr.active_words(), complement(best, K));

    AccuracyRow row;
    row.full = evaluate(train_linear(tr), te).macro_accuracy;
    row.pruned = evaluate(train_linear(prune_hard(tr, ps, table)), prune_hard(te, ps, table)).macro_accuracy;
    row.discard = evaluate(train_linear(discard_baseline(tr, ps).representations),
                           discard_baseline(te, ps).representations)
                      .macro_accuracy;
    return row;
}

// 9. pruned codebook keeps accuracy and beats dropping bins
Outcome accuracy(std::string& info) {
    std::size_t ok = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto r = accuracy_run(seed, 25, 2.2);
        if (r.pruned >= r.full - 0.05 && r.pruned > r.discard) ++ok;
        detail += fmt("%.2f/%.2f/%.2f ", r.full, r.pruned, r.discard);
    }
    std::size_t info_ok = 0, info_beats = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto r = accuracy_run(seed, 50, 2.2);
        info_ok += r.pruned >= r.full - 0.05 && r.pruned > r.discard;
        info_beats += r.pruned > r.discard;
    }
    info = fmt("50 images/class: within 5 points and above discard in %zu/5, above discard in %zu/5", info_ok,
               info_beats);
    return {ok >= 4, fmt("full/pruned/discard per seed: %s-> %zu/5 (need 4, |T|=30 of K=200)", detail.c_str(), ok)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run(const std::string& cmd) {
    return std::system((cmd + " > /dev/null 2>&1").c_str());
}

// 10. replaying a run from its manifest reproduces every report byte for byte
Outcome determinism(const std::string& cli, const fs::path& scratch) {
    if (cli.empty()) return {false, "no CLI path given"};
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const std::string q = "\"" + cli + "\"";
    auto p = [&](const std::string& name) { return "\"" + (scratch / name).string() + "\""; };

    auto mix = planted_mixture();
    io::write_corpus_text(scratch / "train", sample_corpus(mix, 8, 80, 1));
    io::write_corpus_text(scratch / "test", sample_corpus(mix, 8, 80, 2));

    const std::vector<std::string> steps{
        q + " build-codebook --corpus " + p("train") + " --k 20 --seed 3 --out " + p("r1/codebook"),
        q + " encode --corpus " + p("train") + " --codebook " + p("r1/codebook/codebook.json") + " --out " +
            p("r1/enc_train"),
        q + " encode --corpus " + p("test") + " --codebook " + p("r1/codebook/codebook.json") + " --out " +
            p("r1/enc_test"),
        q + " encode --corpus " + p("train") + " --codebook " + p("r1/codebook/codebook.json") +
            " --scheme soft --beta 0.1 --out " + p("r1/enc_soft"),
        q + " select --reps " + p("r1/enc_train/representations.csv") + " --codebook " +
            p("r1/codebook/codebook.json") + " --target-size 8 --seed 5 --out " + p("r1/select"),
        q + " select --coding " + p("r1/enc_soft/coding.csv") + " --codebook " + p("r1/codebook/codebook.json") +
            " --target-size 8 --tmax 60 --seed 5 --out " + p("r1/select_soft"),
        q + " eval --train " + p("r1/enc_train/representations.csv") + " --test " +
            p("r1/enc_test/representations.csv") + " --codebook " + p("r1/codebook/codebook.json") + " --subset " +
            p("r1/select/subset.json") + " --method psi --out " + p("r1/eval"),
        q + " eval --train " + p("r1/enc_train/representations.csv") + " --test " +
            p("r1/enc_test/representations.csv") + " --codebook " + p("r1/codebook/codebook.json") + " --subset " +
            p("r1/select/subset.json") + " --method exact-psi --sigma 0.05 --lambda-samples 20000 --out " +
            p("r1/eval_exact"),
        q + " validate claim2 --instances 3 --seed 4 --out " + p("r1/claim2"),
        q + " validate prop1 --codebook " + p("r1/codebook/codebook.json") +
            " --sigma 0.3 --pruned 2 --descriptors 500 --trials 10 --lambda-samples 20000 --out " + p("r1/prop1"),
    };
    for (const auto& s : steps) {
        if (run(s) != 0) return {false, "command failed: " + s};
    }

    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(scratch / "r1")) {
        if (entry.path().filename() != "manifest.json") continue;
        const fs::path dir = entry.path().parent_path();
        const fs::path replay = scratch / "replay" / fs::relative(dir, scratch / "r1");
        if (run(q + " replay --manifest \"" + entry.path().string() + "\" --out \"" + replay.string() + "\"") != 0) {
            return {false, "replay failed for " + entry.path().string()};
        }
        for (const auto& out : fs::directory_iterator(dir)) {
            const auto name = out.path().filename().string();
            if (name == "manifest.json" || out.is_directory()) continue;
            ++compared;
            if (slurp(out.path()) != slurp(replay / name)) ++differing;
        }
    }
    return {compared > 0 && differing == 0,
            fmt("%zu report files replayed from manifests, %zu differ", compared, differing)};
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "wordprune_acceptance";

    std::string mi_info, acc_info;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"soft-prune-exactness", soft_exactness},
        {"expected-transfer", expected_transfer},
        {"variance-law", variance_law},
        {"mass-conservation", mass_conservation},
        {"beta-entropy", beta_entropy_check},
        {"mi-calibration", [&] { return mi_calibration(mi_info); }},
        {"planted-recovery", planted_recovery},
        {"zero-recoding", zero_recoding},
        {"pruned-accuracy", [&] { return accuracy(acc_info); }},
        {"replay-determinism", [&] { return determinism(cli, scratch); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %-20s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    if (!mi_info.empty()) std::printf("INFO    %s\n", mi_info.c_str());
    if (!acc_info.empty()) std::printf("INFO    %s\n", acc_info.c_str());
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

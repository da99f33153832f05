#include "wordprune/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wordprune/codebook_builder.hpp"
#include "wordprune/coding.hpp"
#include "wordprune/distance.hpp"
#include "wordprune/parallel.hpp"

namespace wordprune {

void SyntheticMixture::validate() const {
    if (means.rows() == 0 || means.cols() == 0) fail_data("mixture needs at least one component");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) fail_data("mixture sigma must be positive");
    auto check_weights = [&](const std::vector<double>& w, const char* what) {
        if (w.size() != means.rows()) fail_data(std::string(what) + ": one weight per component is required");
        double s = 0.0;
        for (double v : w) {
            if (!(v >= 0.0)) fail_data(std::string(what) + ": negative weight");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-9) fail_data(std::string(what) + ": weights must sum to 1");
    };
    if (!priors.empty()) check_weights(priors, "component priors");
    if (class_weights.size() != classes.size()) fail_data("mixture: one weight vector per class is required");
    for (const auto& w : class_weights) check_weights(w, "class component weights");
}

std::vector<double> SyntheticMixture::effective_priors() const {
    if (!priors.empty()) return priors;
    return std::vector<double>(means.rows(), 1.0 / static_cast<double>(means.rows()));
}

GaussianConditional SyntheticMixture::conditional(WordIndex k) const {
    if (k < 1 || k > means.rows()) fail_data("mixture has no component " + std::to_string(k));
    auto r = means.row(k - 1);
    return {{r.begin(), r.end()}, sigma};
}

Codebook SyntheticMixture::codebook() const { return Codebook::from_centroids(means); }

namespace {

void draw_gaussian(std::span<const double> mean, double sigma, std::mt19937_64& rng,
                   std::normal_distribution<double>& noise, std::span<double> out) {
    for (std::size_t j = 0; j < mean.size(); ++j) out[j] = mean[j] + sigma * noise(rng);
}

} // namespace

Matrix sample_component(const SyntheticMixture& mixture, WordIndex k, std::size_t count, std::uint64_t seed) {
    mixture.validate();
    const GaussianConditional g = mixture.conditional(k);
    Matrix out(count, mixture.means.cols());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) draw_gaussian(g.mean, g.sigma, rng, noise, out.row(i));
    return out;
}

DescriptorCorpus sample_corpus(const SyntheticMixture& mixture, std::size_t images_per_class, std::size_t descriptors,
                               std::uint64_t seed) {
    mixture.validate();
    if (descriptors == 0) fail_usage("each synthetic image needs at least one descriptor");
    std::vector<std::string> classes = mixture.classes;
    std::vector<std::vector<double>> weights = mixture.class_weights;
    if (classes.empty()) {
        classes = {"c0"};
        weights = {mixture.effective_priors()};
    }
    const std::size_t d = mixture.means.cols();
    const std::size_t n_images = classes.size() * images_per_class;
    std::vector<Image> images(n_images);
    parallel_for(n_images, [&](std::size_t m) {
        const std::size_t c = m / images_per_class;
        std::mt19937_64 rng(derive_seed(seed, m));
        std::discrete_distribution<std::size_t> pick(weights[c].begin(), weights[c].end());
        std::normal_distribution<double> noise(0.0, 1.0);
        Image img{classes[c] + "_" + std::to_string(m % images_per_class), classes[c], Matrix(descriptors, d)};
        for (std::size_t i = 0; i < descriptors; ++i) {
            const std::size_t comp = pick(rng);
            draw_gaussian(mixture.means.row(comp), mixture.sigma, rng, noise, img.descriptors.row(i));
        }
        images[m] = std::move(img);
    });
    return DescriptorCorpus::validate(d, classes, std::move(images));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<WordIndex> without(std::size_t K, WordIndex l) {
    std::vector<WordIndex> t;
    for (WordIndex w = 1; w <= K; ++w) {
        if (w != l) t.push_back(w);
    }
    return t;
}

// Hard-coding word counts of `points` against `codebook` (oracle path).
std::vector<std::size_t> hard_counts(const Matrix& points, const Codebook& codebook) {
    Image img{"trial", "", points};
    const Matrix H = hard_code(img, codebook);
    std::vector<std::size_t> counts(codebook.size(), 0);
    for (std::size_t i = 0; i < H.rows(); ++i) {
        for (std::size_t k = 0; k < H.cols(); ++k) {
            if (H(i, k) == 1.0) ++counts[k];
        }
    }
    return counts;
}

} // namespace

TransferCheckReport verify_expected_transfer(const SyntheticMixture& mixture, const TransferCheckConfig& config) {
    mixture.validate();
    const Codebook full = mixture.codebook();
    const std::size_t K = full.size();
    const WordIndex l = config.pruned;
    if (l < 1 || l > K) fail_usage("pruned word out of range");
    if (config.descriptors == 0 || config.trials < 2) fail_usage("expected-transfer check needs N >= 1 and M >= 2");

    TransferCheckReport rep;
    rep.config = config;
    rep.surviving = without(K, l);
    rep.lambda = estimate_lambda(full, l, mixture.conditional(l), config.lambda_samples, derive_seed(config.seed, 0));
    const Codebook pruned = full.restrict(rep.surviving);
    const double N = static_cast<double>(config.descriptors);

    rep.trials.resize(config.trials);
    parallel_for(config.trials, [&](std::size_t t) {
        const Matrix x = sample_component(mixture, l, config.descriptors, derive_seed(config.seed, t + 1));
        const auto cf = hard_counts(x, full);
        const auto cp = hard_counts(x, pruned);
        TransferCheckTrial tr;
        tr.trial = t;
        tr.in_cell = cf[l - 1];
        for (std::size_t c : cf) tr.full.push_back(static_cast<double>(c) / N);
        for (std::size_t c : cp) tr.oracle.push_back(static_cast<double>(c) / N);
        rep.trials[t] = std::move(tr);
    });

    const double M = static_cast<double>(config.trials);
    double mean_fl = 0.0;
    for (const auto& tr : rep.trials) {
        rep.mean_in_cell += static_cast<double>(tr.in_cell) / M;
        mean_fl += tr.full[l - 1] / M;
    }
    rep.pass = true;
    for (std::size_t t = 0; t < rep.surviving.size(); ++t) {
        const WordIndex k = rep.surviving[t];
        TransferCheckBin b;
        b.word = k;
        b.lambda = rep.lambda.weight(k);
        double sum_diff = 0.0;
        std::vector<double> diff;
        diff.reserve(config.trials);
        for (const auto& tr : rep.trials) {
            const double psi = tr.full[k - 1] + b.lambda * tr.full[l - 1];
            b.mean_full += tr.full[k - 1] / M;
            b.mean_oracle += tr.oracle[t] / M;
            b.mean_psi += psi / M;
            diff.push_back(tr.oracle[t] - psi);
            sum_diff += diff.back();
        }
        const double mean_diff = sum_diff / M;
        double ss = 0.0;
        for (double v : diff) ss += (v - mean_diff) * (v - mean_diff);
        b.var_empirical = ss / (M - 1.0);
        b.var_predicted = rep.mean_in_cell * b.lambda * (1.0 - b.lambda) / (N * N);
        const double lambda_var = b.lambda * (1.0 - b.lambda) / static_cast<double>(rep.lambda.kept_samples);
        b.standard_error = std::sqrt(b.var_empirical / M + mean_fl * mean_fl * lambda_var);
        b.gap = std::abs(b.mean_oracle - b.mean_psi);
        b.pass = b.gap <= config.tolerance_se * b.standard_error || b.gap == 0.0;
        rep.max_gap = std::max(rep.max_gap, b.gap);
        if (b.standard_error > 0.0) rep.max_gap_in_se = std::max(rep.max_gap_in_se, b.gap / b.standard_error);
        rep.pass = rep.pass && b.pass;
        rep.bins.push_back(b);
    }
    return rep;
}

VarianceReport verify_variance(const SyntheticMixture& mixture, const VarianceConfig& config) {
    mixture.validate();
    const Codebook full = mixture.codebook();
    const std::size_t K = full.size();
    const WordIndex l = config.pruned;
    if (l < 1 || l > K) fail_usage("pruned word out of range");
    if (config.trials < 2) fail_usage("variance check needs at least 2 trials");

    VarianceReport rep;
    rep.config = config;
    rep.lambda = estimate_lambda(full, l, mixture.conditional(l), config.lambda_samples, derive_seed(config.seed, 0));
    const std::vector<WordIndex> surv = without(K, l);
    const Codebook pruned = full.restrict(surv);

    // Fixed partition: one base image decides |S1|; S2 stays deterministic.
    const Matrix base = sample_component(mixture, l, config.descriptors, derive_seed(config.seed, 1));
    rep.in_cell = hard_counts(base, full)[l - 1];
    if (rep.in_cell == 0) fail_numerical("variance check: no descriptor of the base image falls in the pruned cell");

    // Per trial: redraw the |S1| in-cell descriptors by rejection, re-code them.
    std::vector<std::vector<std::size_t>> counts(config.trials);
    parallel_for(config.trials, [&](std::size_t t) {
        std::mt19937_64 rng(derive_seed(config.seed, t + 2));
        std::normal_distribution<double> noise(0.0, 1.0);
        const GaussianConditional g = mixture.conditional(l);
        std::vector<double> x(full.dim()), dist(K);
        Matrix cell(0, 0);
        std::size_t attempts = 0;
        while (cell.rows() < rep.in_cell) {
            if (++attempts > 1000 * (rep.in_cell + 1000)) fail_numerical("variance check: rejection sampling stalled");
            draw_gaussian(g.mean, g.sigma, rng, noise, x);
            // geometry test only, not a coding step
            for (std::size_t k = 0; k < K; ++k) dist[k] = point_distance(x, full.centroids().row(k), full.metric());
            if (nearest_word(dist) == l - 1) cell.append_row(x);
        }
        counts[t] = hard_counts(cell, pruned);
    });

    const double N = static_cast<double>(config.descriptors);
    const double M = static_cast<double>(config.trials);
    rep.pass = true;
    for (std::size_t t = 0; t < surv.size(); ++t) {
        VarianceBin b;
        b.word = surv[t];
        b.lambda = rep.lambda.weight(b.word);
        double mean = 0.0;
        for (const auto& c : counts) mean += static_cast<double>(c[t]) / N / M;
        double ss = 0.0;
        for (const auto& c : counts) {
            const double v = static_cast<double>(c[t]) / N - mean;
            ss += v * v;
        }
        b.var_empirical = ss / (M - 1.0);
        b.var_predicted = static_cast<double>(rep.in_cell) * b.lambda * (1.0 - b.lambda) / (N * N);
        b.ratio = b.var_predicted > 0.0 ? b.var_empirical / b.var_predicted : 0.0;
        b.judged = b.lambda >= config.min_lambda && b.lambda <= 1.0 - config.min_lambda;
        if (b.judged) b.pass = b.ratio >= config.ratio_low && b.ratio <= config.ratio_high;
        rep.pass = rep.pass && b.pass;
        rep.bins.push_back(b);
    }
    return rep;
}

std::vector<HeuristicGapRow> heuristic_gap(const SyntheticMixture& mixture, WordIndex pruned,
                                           std::span<const double> sigmas, std::span<const std::size_t> ms,
                                           std::uint64_t lambda_samples, std::uint64_t seed,
                                           const std::vector<double>& representation) {
    mixture.validate();
    const Codebook cb = mixture.codebook();
    const std::size_t K = cb.size();
    std::vector<double> f = representation;
    if (f.empty()) f.assign(K, 1.0 / static_cast<double>(K));
    const Representation rep = Representation::make(f, cb.index_set());

    std::vector<HeuristicGapRow> rows;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        GaussianConditional g = mixture.conditional(pruned);
        g.sigma = sigmas[si];
        const TransitionWeights lam = estimate_lambda(cb, pruned, g, lambda_samples, derive_seed(seed, si));
        const Representation exact = psi_exact(rep, pruned, lam);
        for (std::size_t m : ms) {
            const NeighborTable table = build_neighbor_table(cb, m);
            const Representation heur = psi_heuristic(rep, pruned, table);
            HeuristicGapRow row;
            row.sigma = sigmas[si];
            row.m = m;
            row.words = exact.active_words();
            for (std::size_t i = 0; i < exact.size(); ++i) {
                row.gap.push_back(std::abs(heur.values()[i] - exact.values()[i]));
                row.max_gap = std::max(row.max_gap, row.gap.back());
                row.mean_gap += row.gap.back() / static_cast<double>(exact.size());
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

SoftExactnessReport verify_soft_exactness(const SoftExactnessConfig& config) {
    if (config.min_words < 2 || config.max_words < config.min_words) fail_usage("soft exactness check: invalid word range");
    SoftExactnessReport rep;
    rep.config = config;
    for (std::size_t inst = 0; inst < config.instances; ++inst) {
        std::mt19937_64 rng(derive_seed(config.seed, inst));
        std::uniform_int_distribution<std::size_t> pick_k(config.min_words, config.max_words);
        std::uniform_int_distribution<std::size_t> pick_d(2, 8);
        std::uniform_int_distribution<std::size_t> pick_n(5, 40);
        std::uniform_int_distribution<std::size_t> pick_images(1, 4);
        std::normal_distribution<double> normal(0.0, 1.0);
        SoftExactnessInstance ci;
        ci.words = pick_k(rng);
        ci.dim = pick_d(rng);
        // beta * (typical squared distance ~ 2d) stays within a few tens
        ci.softness = std::uniform_real_distribution<double>(0.05, 2.0)(rng) / static_cast<double>(ci.dim);

        Matrix centers(ci.words, ci.dim);
        for (double& v : centers.data()) v = normal(rng);
        const Codebook cb = Codebook::from_centroids(std::move(centers));
        std::vector<Image> images;
        const std::size_t n_images = pick_images(rng);
        for (std::size_t m = 0; m < n_images; ++m) {
            Image img{"img" + std::to_string(m), "c0", Matrix(pick_n(rng), ci.dim)};
            for (double& v : img.descriptors.data()) v = 1.5 * normal(rng);
            images.push_back(std::move(img));
        }
        const auto corpus = DescriptorCorpus::validate(ci.dim, {"c0"}, std::move(images));

        std::vector<WordIndex> all = cb.index_set();
        std::vector<WordIndex> shuffled = all;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        ci.pruned = std::uniform_int_distribution<std::size_t>(0, ci.words - 1)(rng);
        std::vector<WordIndex> s(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(ci.pruned));
        const PruneSet ps = PruneSet::make(all, s);

        const EncodedCorpus enc = encode_corpus(corpus, cb, {Scheme::soft, ci.softness, true});
        RepresentationMatrix fast = [&] {
            const DistanceCountScope scope;
            auto r = prune_soft(*enc.coding, ps);
            ci.pruning_distance_evaluations = scope.evaluations();
            return r;
        }();
        const DistanceCountScope oracle_scope;
        const EncodedCorpus brute = encode_corpus(corpus, cb.restrict(ps.surviving()), {Scheme::soft, ci.softness, false});
        ci.oracle_distance_evaluations = oracle_scope.evaluations();

        for (std::size_t r = 0; r < fast.size(); ++r) {
            for (std::size_t k = 0; k < ps.surviving().size(); ++k) {
                ci.max_error = std::max(ci.max_error, std::abs(fast.values()(r, k) - brute.representations.values()(r, k)));
            }
        }
        rep.max_error = std::max(rep.max_error, ci.max_error);
        rep.instances.push_back(ci);
    }
    rep.pass = rep.max_error <= config.tolerance;
    return rep;
}

double prune_order_deviation(const RepresentationMatrix& reps, const PruneSet& prune, const NeighborTable& table,
                             std::size_t orders, std::uint64_t seed) {
    const RepresentationMatrix base = prune_hard(reps, prune, table);
    double worst = 0.0;
    for (std::size_t o = 0; o < orders; ++o) {
        const RepresentationMatrix alt = prune_hard(reps, prune, table, {PruneOrder::shuffled, derive_seed(seed, o)});
        for (std::size_t i = 0; i < base.values().data().size(); ++i) {
            worst = std::max(worst, std::abs(base.values().data()[i] - alt.values().data()[i]));
        }
    }
    return worst;
}

} // namespace wordprune

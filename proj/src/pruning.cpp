#include "wordprune/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wordprune/distance.hpp"
#include "wordprune/parallel.hpp"

namespace wordprune {

double TransitionWeights::weight(WordIndex k) const noexcept {
    for (const auto& [w, lam] : weights) {
        if (w == k) return lam;
    }
    return 0.0;
}

void TransitionWeights::validate() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const auto [w, lam] = weights[i];
        if (w == pruned) fail_data("transition weights of word " + std::to_string(pruned) + " include the word itself");
        if (!(lam >= 0.0 && lam <= 1.0)) fail_data("transition weight outside [0,1]");
        if (i > 0 && w <= weights[i - 1].first) fail_data("transition weights must be sorted by word index");
        s += lam;
    }
    if (std::abs(s - 1.0) > sum_tolerance) {
        fail_data("transition weights of word " + std::to_string(pruned) + " sum to " + std::to_string(s));
    }
}

// ---------------------------------------------------------------------------

PruneSet PruneSet::make(std::span<const WordIndex> active, std::span<const WordIndex> pruned) {
    check_word_subset(active, 0, "active words");
    std::vector<WordIndex> s(pruned.begin(), pruned.end());
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) fail_data("prune set contains a word twice");
    for (WordIndex w : s) {
        if (!std::binary_search(active.begin(), active.end(), w)) {
            fail_data("pruned word " + std::to_string(w) + " is not active");
        }
    }
    PruneSet ps;
    std::set_difference(active.begin(), active.end(), s.begin(), s.end(), std::back_inserter(ps.surviving_));
    if (ps.surviving_.empty()) fail_data("prune set removes every word; at least one must survive");
    ps.pruned_ = std::move(s);
    return ps;
}

PruneSet PruneSet::keep(std::span<const WordIndex> active, std::span<const WordIndex> surviving) {
    std::vector<WordIndex> t(surviving.begin(), surviving.end());
    std::sort(t.begin(), t.end());
    std::vector<WordIndex> s;
    std::set_difference(active.begin(), active.end(), t.begin(), t.end(), std::back_inserter(s));
    PruneSet ps = make(active, s);
    if (ps.surviving_ != t) fail_data("surviving words are not a subset of the active words");
    return ps;
}

// ---------------------------------------------------------------------------

namespace {

// Neighbor walk over a dense activity mask (index by word, 1-based).
std::vector<WordIndex> walk_neighbors(const NeighborTable& table, WordIndex l, const std::vector<char>& active,
                                      std::size_t active_count) {
    const std::size_t want = std::min(table.m(), active_count - 1);
    std::vector<WordIndex> out;
    out.reserve(want);
    for (WordIndex k : table.extended(l)) {
        if (out.size() == want) break;
        if (k < active.size() && active[k]) out.push_back(k);
    }
    if (out.size() < want) {
        fail_data("neighbor table too shallow: word " + std::to_string(l) + " has only " +
                  std::to_string(out.size()) + " surviving neighbors in a list of depth " +
                  std::to_string(table.depth()) + ", need " + std::to_string(want));
    }
    return out;
}

std::vector<char> mask_of(std::span<const WordIndex> words, std::size_t K) {
    std::vector<char> mask(K + 1, 0);
    for (WordIndex w : words) {
        if (w <= K) mask[w] = 1;
    }
    return mask;
}

std::size_t position_of(std::span<const WordIndex> words, WordIndex w) {
    auto it = std::lower_bound(words.begin(), words.end(), w);
    if (it == words.end() || *it != w) fail_data("word " + std::to_string(w) + " is not active");
    return static_cast<std::size_t>(it - words.begin());
}

} // namespace

std::vector<WordIndex> active_neighbors(const NeighborTable& table, WordIndex l, std::span<const WordIndex> active) {
    const std::size_t K = table.words();
    if (!std::binary_search(active.begin(), active.end(), l)) fail_data("word " + std::to_string(l) + " is not active");
    if (active.size() < 2) fail_data("word " + std::to_string(l) + " has no surviving neighbors");
    return walk_neighbors(table, l, mask_of(active, K), active.size());
}

Representation psi_heuristic(const Representation& rep, WordIndex l, const NeighborTable& table) {
    const auto& active = rep.active_words();
    const std::size_t pos_l = position_of(active, l);
    const std::vector<WordIndex> nbrs = active_neighbors(table, l, active);
    const double share = rep.values()[pos_l] / static_cast<double>(nbrs.size());

    std::vector<double> values;
    std::vector<WordIndex> words;
    values.reserve(active.size() - 1);
    words.reserve(active.size() - 1);
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (i == pos_l) continue;
        words.push_back(active[i]);
        values.push_back(rep.values()[i]);
    }
    for (WordIndex k : nbrs) values[position_of(words, k)] += share;
    return Representation::make(std::move(values), std::move(words));
}

Representation psi_exact(const Representation& rep, WordIndex l, const TransitionWeights& weights) {
    weights.validate();
    if (weights.pruned != l) fail_data("transition weights belong to word " + std::to_string(weights.pruned));
    const auto& active = rep.active_words();
    const std::size_t pos_l = position_of(active, l);
    const double fl = rep.values()[pos_l];

    std::vector<double> values;
    std::vector<WordIndex> words;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (i == pos_l) continue;
        words.push_back(active[i]);
        values.push_back(rep.values()[i]);
    }
    if (words.empty()) fail_data("cannot prune the only active word");
    for (const auto& [k, lam] : weights.weights) {
        auto it = std::lower_bound(words.begin(), words.end(), k);
        if (it == words.end() || *it != k) {
            fail_data("transition weight support contains word " + std::to_string(k) + ", which is not surviving");
        }
        values[static_cast<std::size_t>(it - words.begin())] += lam * fl;
    }
    return Representation::make(std::move(values), std::move(words));
}

// ---------------------------------------------------------------------------

TransitionWeights estimate_lambda(const Codebook& codebook, WordIndex l, const GaussianConditional& conditional,
                                  std::uint64_t samples, std::uint64_t seed, std::span<const WordIndex> active_in) {
    const std::size_t K = codebook.size();
    const std::size_t d = codebook.dim();
    std::vector<WordIndex> active = active_in.empty() ? codebook.index_set()
                                                      : std::vector<WordIndex>(active_in.begin(), active_in.end());
    check_word_subset(active, K, "lambda estimation");
    if (!std::binary_search(active.begin(), active.end(), l)) fail_data("word " + std::to_string(l) + " is not active");
    if (active.size() < 2) fail_data("word " + std::to_string(l) + " has no other active word");
    if (!(conditional.sigma > 0.0) || !std::isfinite(conditional.sigma)) fail_usage("sigma must be positive");
    if (conditional.mean.size() != d) fail_data("conditional mean has the wrong dimension");
    if (samples == 0) fail_usage("lambda estimation needs at least one sample");

    constexpr std::uint64_t block = 1u << 15;
    const std::uint64_t blocks = (samples + block - 1) / block;
    std::vector<std::vector<std::uint64_t>> counts(blocks, std::vector<std::uint64_t>(active.size(), 0));

    parallel_for(blocks, [&](std::size_t b) {
        std::mt19937_64 rng(derive_seed(seed, b));
        std::normal_distribution<double> noise(0.0, conditional.sigma);
        const std::uint64_t n = std::min(block, samples - b * block);
        std::vector<double> x(d);
        auto& tally = counts[b];
        for (std::uint64_t s = 0; s < n; ++s) {
            for (std::size_t j = 0; j < d; ++j) x[j] = conditional.mean[j] + noise(rng);
            // nearest active word, and nearest once l is gone (lowest index on ties)
            std::size_t best = 0, second = 0;
            double bd = INFINITY, sd = INFINITY;
            for (std::size_t a = 0; a < active.size(); ++a) {
                const double da = point_distance(x, codebook.centroid(active[a]), codebook.metric());
                if (da < bd) {
                    second = best;
                    sd = bd;
                    best = a;
                    bd = da;
                } else if (da < sd) {
                    second = a;
                    sd = da;
                }
            }
            if (active[best] == l) ++tally[second];
        }
    });

    std::vector<std::uint64_t> total(active.size(), 0);
    for (const auto& t : counts) {
        for (std::size_t a = 0; a < t.size(); ++a) total[a] += t[a];
    }
    const std::uint64_t kept = std::accumulate(total.begin(), total.end(), std::uint64_t{0});
    if (kept == 0) {
        fail_numerical("lambda estimation for word " + std::to_string(l) + ": none of " + std::to_string(samples) +
                       " samples fell in its cell (sigma too large or mean outside the cell)");
    }
    TransitionWeights tw;
    tw.pruned = l;
    tw.kept_samples = kept;
    tw.total_samples = samples;
    for (std::size_t a = 0; a < active.size(); ++a) {
        if (total[a] > 0) tw.weights.emplace_back(active[a], static_cast<double>(total[a]) / static_cast<double>(kept));
    }
    return tw;
}

// ---------------------------------------------------------------------------

RepresentationMatrix prune_hard(const RepresentationMatrix& reps, const PruneSet& prune, const NeighborTable& table,
                                const HardPruneOptions& options) {
    const auto& active = reps.active_words();
    const std::size_t K = table.words();
    if (!active.empty() && active.back() > K) fail_data("neighbor table covers fewer words than the representation");
    if (prune.surviving().empty()) fail_data("prune set leaves no surviving word");
    for (WordIndex w : prune.pruned()) position_of(active, w);

    std::vector<WordIndex> order = prune.pruned();
    if (options.order == PruneOrder::descending) {
        std::reverse(order.begin(), order.end());
    } else if (options.order == PruneOrder::shuffled) {
        std::mt19937_64 rng(options.seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    // The neighbor sets depend only on which words are active at each step,
    // so they are resolved once and replayed on every row.
    std::vector<char> mask = mask_of(active, K);
    std::size_t active_count = active.size();
    std::vector<std::vector<WordIndex>> receivers;
    receivers.reserve(order.size());
    for (WordIndex l : order) {
        receivers.push_back(walk_neighbors(table, l, mask, active_count));
        mask[l] = 0;
        --active_count;
    }

    const std::size_t n = reps.size();
    const auto& surv = prune.surviving();
    Matrix out(n, surv.size());
    parallel_for(n, [&](std::size_t r) {
        std::vector<double> f(K + 1, 0.0);
        auto src = reps.values().row(r);
        for (std::size_t i = 0; i < active.size(); ++i) f[active[i]] = src[i];
        for (std::size_t s = 0; s < order.size(); ++s) {
            const WordIndex l = order[s];
            const double share = f[l] / static_cast<double>(receivers[s].size());
            for (WordIndex k : receivers[s]) f[k] += share;
            f[l] = 0.0;
        }
        auto dst = out.row(r);
        for (std::size_t i = 0; i < surv.size(); ++i) dst[i] = f[surv[i]];
    });
    return RepresentationMatrix::make(std::move(out), surv, reps.ids(), reps.labels());
}

RepresentationMatrix prune_hard_exact(const RepresentationMatrix& reps, std::span<const WordIndex> order,
                                      std::span<const TransitionWeights> weights) {
    if (order.size() != weights.size()) fail_data("one weight table per pruned word is required");
    const auto& active = reps.active_words();
    std::vector<char> mask = mask_of(active, active.empty() ? 0 : active.back());
    for (std::size_t s = 0; s < order.size(); ++s) {
        const WordIndex l = order[s];
        weights[s].validate();
        if (weights[s].pruned != l) fail_data("weight table order does not match prune order");
        if (l >= mask.size() || !mask[l]) fail_data("pruned word " + std::to_string(l) + " is not active");
        mask[l] = 0;
        for (const auto& [k, lam] : weights[s].weights) {
            if (k >= mask.size() || !mask[k]) {
                fail_data("transition weights of word " + std::to_string(l) + " reach inactive word " + std::to_string(k));
            }
        }
    }
    std::vector<WordIndex> surv;
    for (WordIndex w : active) {
        if (mask[w]) surv.push_back(w);
    }
    if (surv.empty()) fail_data("prune set leaves no surviving word");

    const std::size_t n = reps.size();
    Matrix out(n, surv.size());
    parallel_for(n, [&](std::size_t r) {
        std::vector<double> f(mask.size(), 0.0);
        auto src = reps.values().row(r);
        for (std::size_t i = 0; i < active.size(); ++i) f[active[i]] = src[i];
        for (std::size_t s = 0; s < order.size(); ++s) {
            const double fl = f[order[s]];
            for (const auto& [k, lam] : weights[s].weights) f[k] += lam * fl;
            f[order[s]] = 0.0;
        }
        auto dst = out.row(r);
        for (std::size_t i = 0; i < surv.size(); ++i) dst[i] = f[surv[i]];
    });
    return RepresentationMatrix::make(std::move(out), std::move(surv), reps.ids(), reps.labels());
}

RepresentationMatrix prune_soft(const CodingMatrix& coding, const PruneSet& prune) {
    if (coding.scheme() != Scheme::soft) fail_data("prune_soft needs a retained soft coding matrix");
    const std::size_t K = coding.words();
    const auto& surv = prune.surviving();
    check_word_subset(surv, K, "surviving words");
    check_word_subset(prune.pruned(), K, "pruned words");

    const std::size_t n = coding.per_image().size();
    Matrix out(n, surv.size());
    parallel_for(n, [&](std::size_t m) {
        const Matrix& H = coding.per_image()[m];
        auto dst = out.row(m);
        for (std::size_t i = 0; i < H.rows(); ++i) {
            auto h = H.row(i);
            double z = 0.0;
            for (WordIndex w : surv) z += h[w - 1];
            if (!(z >= 1e-300)) {
                fail_numerical("image '" + coding.ids()[m] + "' row " + std::to_string(i) +
                               ": surviving coefficients vanish, renormalization undefined");
            }
            for (std::size_t t = 0; t < surv.size(); ++t) dst[t] += h[surv[t] - 1] / z;
        }
        const double inv = 1.0 / static_cast<double>(H.rows());
        for (double& v : dst) v *= inv;
    });
    return RepresentationMatrix::make(std::move(out), surv, coding.ids(), coding.labels());
}

DiscardResult discard_baseline(const RepresentationMatrix& reps, const PruneSet& prune) {
    const auto& active = reps.active_words();
    const auto& surv = prune.surviving();
    std::vector<std::size_t> cols;
    cols.reserve(surv.size());
    for (WordIndex w : surv) cols.push_back(position_of(active, w));

    Matrix out(reps.size(), surv.size());
    std::vector<std::size_t> flagged;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        auto src = reps.values().row(r);
        auto dst = out.row(r);
        double z = 0.0;
        for (std::size_t t = 0; t < cols.size(); ++t) {
            dst[t] = src[cols[t]];
            z += dst[t];
        }
        if (z > 0.0) {
            for (double& v : dst) v /= z;
        } else {
            std::fill(dst.begin(), dst.end(), 1.0 / static_cast<double>(dst.size()));
            flagged.push_back(r);
        }
    }
    return {RepresentationMatrix::make(std::move(out), surv, reps.ids(), reps.labels()), std::move(flagged)};
}

} // namespace wordprune

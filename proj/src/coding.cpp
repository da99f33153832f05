#include "wordprune/coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wordprune/distance.hpp"
#include "wordprune/parallel.hpp"

namespace wordprune {

namespace {

void check_dims(const Image& image, const Codebook& codebook) {
    if (image.descriptors.cols() != codebook.dim()) {
        fail_data("image '" + image.id + "' has descriptor dimension " + std::to_string(image.descriptors.cols()) +
                  " but the codebook has dimension " + std::to_string(codebook.dim()));
    }
}

} // namespace

std::size_t nearest_word(std::span<const double> distances) noexcept {
    std::size_t best = 0;
    for (std::size_t k = 1; k < distances.size(); ++k) {
        if (distances[k] < distances[best]) best = k;
    }
    return best;
}

void soft_assign(std::span<const double> distances, double softness, std::span<double> out) {
    if (!(softness > 0.0) || !std::isfinite(softness)) fail_usage("soft coding requires beta > 0");
    const double dmin = *std::min_element(distances.begin(), distances.end());
    double z = 0.0;
    for (std::size_t k = 0; k < distances.size(); ++k) {
        out[k] = std::exp(-softness * (distances[k] - dmin));
        z += out[k];
    }
    for (double& v : out) v /= z;
}

Matrix hard_code(const Image& image, const Codebook& codebook) {
    check_dims(image, codebook);
    const std::size_t N = image.descriptors.rows();
    const std::size_t K = codebook.size();
    Matrix H(N, K);
    std::vector<double> dist(K);
    for (std::size_t i = 0; i < N; ++i) {
        distances_to_centroids(image.descriptors.row(i), codebook, dist);
        H(i, nearest_word(dist)) = 1.0;
    }
    return H;
}

Matrix soft_code(const Image& image, const Codebook& codebook, double softness) {
    if (!(softness > 0.0) || !std::isfinite(softness)) fail_usage("soft coding requires beta > 0");
    check_dims(image, codebook);
    const std::size_t N = image.descriptors.rows();
    const std::size_t K = codebook.size();
    Matrix H(N, K);
    std::vector<double> dist(K);
    for (std::size_t i = 0; i < N; ++i) {
        distances_to_centroids(image.descriptors.row(i), codebook, dist);
        soft_assign(dist, softness, H.row(i));
    }
    return H;
}

Representation average_pool(const Matrix& rows, std::vector<WordIndex> active_words) {
    if (rows.rows() == 0) fail_data("average pooling needs at least one coding row");
    std::vector<double> f(rows.cols(), 0.0);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        auto r = rows.row(i);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] += r[k];
    }
    const double inv = 1.0 / static_cast<double>(rows.rows());
    for (double& v : f) v *= inv;
    return Representation::make(std::move(f), std::move(active_words));
}

Representation average_pool(const Matrix& rows) {
    std::vector<WordIndex> words(rows.cols());
    for (std::size_t k = 0; k < words.size(); ++k) words[k] = k + 1;
    return average_pool(rows, std::move(words));
}

EncodedCorpus encode_corpus(const DescriptorCorpus& corpus, const Codebook& codebook,
                            const EncodeOptions& options) {
    if (corpus.dim() != codebook.dim()) {
        fail_data("corpus dimension " + std::to_string(corpus.dim()) + " does not match codebook dimension " +
                  std::to_string(codebook.dim()));
    }
    if (options.scheme == Scheme::soft && !(options.softness > 0.0)) fail_usage("soft coding requires beta > 0");

    const std::size_t n = corpus.size();
    const std::size_t K = codebook.size();
    std::vector<Matrix> codings(n);
    Matrix pooled(n, K);
    parallel_for(n, [&](std::size_t m) {
        const Image& img = corpus.images()[m];
        Matrix H = options.scheme == Scheme::hard ? hard_code(img, codebook)
                                                  : soft_code(img, codebook, options.softness);
        const Representation f = average_pool(H);
        std::copy(f.values().begin(), f.values().end(), pooled.row(m).begin());
        if (options.retain_coding) codings[m] = std::move(H);
    });

    std::vector<std::string> ids, labels;
    std::uint64_t evaluations = 0;
    for (const auto& img : corpus.images()) {
        ids.push_back(img.id);
        labels.push_back(img.label);
        evaluations += img.descriptors.rows() * K;
    }
    EncodedCorpus out{RepresentationMatrix::make(std::move(pooled), codebook.index_set(), ids, labels),
                      std::nullopt, evaluations};
    if (options.retain_coding) {
        out.coding = CodingMatrix::make(std::move(codings), options.scheme, options.softness, codebook.metric(),
                                        std::move(ids), std::move(labels));
    }
    return out;
}

} // namespace wordprune

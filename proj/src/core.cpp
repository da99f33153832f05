#include "wordprune/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "wordprune/distance.hpp"

namespace wordprune {

void fail_usage(const std::string& msg) { throw Error(ErrorKind::usage, msg); }
void fail_data(const std::string& msg) { throw Error(ErrorKind::data, msg); }
void fail_numerical(const std::string& msg) { throw Error(ErrorKind::numerical, msg); }

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) fail_data("row length mismatch in Matrix::append_row");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

std::string to_string(Metric m) {
    switch (m) {
    case Metric::squared_euclidean: return "sqeuclidean";
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    }
    return "sqeuclidean";
}

Metric parse_metric(const std::string& name) {
    if (name == "sqeuclidean") return Metric::squared_euclidean;
    if (name == "euclidean") return Metric::euclidean;
    if (name == "manhattan") return Metric::manhattan;
    fail_usage("unknown metric '" + name + "' (expected sqeuclidean, euclidean or manhattan)");
}

std::string to_string(Scheme s) { return s == Scheme::hard ? "hard" : "soft"; }

Scheme parse_scheme(const std::string& name) {
    if (name == "hard") return Scheme::hard;
    if (name == "soft") return Scheme::soft;
    fail_usage("unknown coding scheme '" + name + "' (expected hard or soft)");
}

// ---------------------------------------------------------------------------

DescriptorCorpus DescriptorCorpus::validate(RawCorpus raw) {
    if (raw.dim == 0) fail_data("corpus dimensionality must be positive");
    std::vector<Image> images;
    images.reserve(raw.images.size());
    for (auto& ri : raw.images) {
        if (ri.rows.empty()) fail_data("image '" + ri.id + "' has no descriptors");
        Image img{ri.id, ri.label, Matrix(ri.rows.size(), raw.dim)};
        for (std::size_t i = 0; i < ri.rows.size(); ++i) {
            if (ri.rows[i].size() != raw.dim) {
                fail_data("image '" + ri.id + "': descriptor " + std::to_string(i) + " has dimension " +
                          std::to_string(ri.rows[i].size()) + ", expected " + std::to_string(raw.dim));
            }
            std::copy(ri.rows[i].begin(), ri.rows[i].end(), img.descriptors.row(i).begin());
        }
        images.push_back(std::move(img));
    }
    return validate(raw.dim, std::move(raw.classes), std::move(images));
}

DescriptorCorpus DescriptorCorpus::validate(std::size_t dim, std::vector<std::string> classes,
                                            std::vector<Image> images) {
    if (dim == 0) fail_data("corpus dimensionality must be positive");
    std::set<std::string> seen(classes.begin(), classes.end());
    if (seen.size() != classes.size()) fail_data("class labels are not distinct");
    if (images.empty()) fail_data("corpus has no images");
    std::set<std::string> ids;
    for (const auto& img : images) {
        if (!ids.insert(img.id).second) fail_data("duplicate image id '" + img.id + "'");
        if (img.descriptors.rows() == 0) fail_data("image '" + img.id + "' has no descriptors");
        if (img.descriptors.cols() != dim) {
            fail_data("image '" + img.id + "' has descriptor dimension " +
                      std::to_string(img.descriptors.cols()) + ", expected " + std::to_string(dim));
        }
        if (!seen.contains(img.label)) fail_data("image '" + img.id + "' has unknown label '" + img.label + "'");
        for (double v : img.descriptors.data()) {
            if (!std::isfinite(v)) fail_data("image '" + img.id + "' contains a non-finite value");
        }
    }
    DescriptorCorpus c;
    c.dim_ = dim;
    c.classes_ = std::move(classes);
    c.images_ = std::move(images);
    return c;
}

std::size_t DescriptorCorpus::total_descriptors() const noexcept {
    std::size_t n = 0;
    for (const auto& img : images_) n += img.descriptors.rows();
    return n;
}

DescriptorCorpus DescriptorCorpus::subset(std::span<const std::size_t> positions) const {
    std::vector<Image> out;
    out.reserve(positions.size());
    for (std::size_t p : positions) {
        if (p >= images_.size()) fail_data("image position out of range");
        out.push_back(images_[p]);
    }
    return validate(dim_, classes_, std::move(out));
}

// ---------------------------------------------------------------------------

Codebook Codebook::from_centroids(Matrix centroids, Metric metric) {
    if (centroids.rows() == 0 || centroids.cols() == 0) fail_data("codebook must have at least one centroid");
    for (double v : centroids.data()) {
        if (!std::isfinite(v)) fail_data("codebook contains a non-finite centroid coordinate");
    }
    for (std::size_t a = 0; a < centroids.rows(); ++a) {
        for (std::size_t b = a + 1; b < centroids.rows(); ++b) {
            if (centroid_distance(centroids.row(a), centroids.row(b), metric) <= 0.0) {
                fail_data("codebook centroids " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                          " coincide");
            }
        }
    }
    Codebook cb;
    cb.centroids_ = std::move(centroids);
    cb.metric_ = metric;
    return cb;
}

std::vector<WordIndex> Codebook::index_set() const {
    std::vector<WordIndex> idx(size());
    std::iota(idx.begin(), idx.end(), WordIndex{1});
    return idx;
}

Codebook Codebook::restrict(std::span<const WordIndex> words) const {
    Matrix sub(0, 0);
    for (WordIndex w : words) {
        if (w < 1 || w > size()) fail_data("word index " + std::to_string(w) + " outside codebook");
        sub.append_row(centroid(w));
    }
    Codebook cb;
    cb.centroids_ = std::move(sub);
    cb.metric_ = metric_;
    if (cb.centroids_.rows() == 0) fail_data("restricted codebook is empty");
    return cb;
}

// ---------------------------------------------------------------------------

NeighborTable::NeighborTable(std::size_t m, std::vector<std::vector<WordIndex>> lists)
    : m_(m), lists_(std::move(lists)) {
    if (m_ == 0) fail_data("neighbor table size m must be positive");
    const std::size_t K = lists_.size();
    for (std::size_t l = 0; l < K; ++l) {
        const auto& list = lists_[l];
        if (list.size() < m_ || list.size() != lists_.front().size()) {
            fail_data("neighbor list of word " + std::to_string(l + 1) + " has inconsistent length");
        }
        std::set<WordIndex> uniq;
        for (WordIndex w : list) {
            if (w < 1 || w > K || w == l + 1 || !uniq.insert(w).second) {
                fail_data("neighbor list of word " + std::to_string(l + 1) + " is malformed");
            }
        }
    }
}

std::span<const WordIndex> NeighborTable::nearest(WordIndex l) const {
    return extended(l).first(m_);
}

std::span<const WordIndex> NeighborTable::extended(WordIndex l) const {
    if (l < 1 || l > lists_.size()) fail_data("word " + std::to_string(l) + " has no neighbor list");
    return lists_[l - 1];
}

// ---------------------------------------------------------------------------

CodingMatrix CodingMatrix::make(std::vector<Matrix> per_image, Scheme scheme, double softness,
                                Metric metric, std::vector<std::string> ids,
                                std::vector<std::string> labels) {
    if (ids.size() != per_image.size() || labels.size() != per_image.size()) {
        fail_data("coding matrix: ids/labels do not match image count");
    }
    if (scheme == Scheme::soft && !(softness > 0.0)) fail_data("soft coding requires softness > 0");
    const std::size_t K = per_image.empty() ? 0 : per_image.front().cols();
    for (std::size_t m = 0; m < per_image.size(); ++m) {
        const Matrix& H = per_image[m];
        if (H.cols() != K || H.rows() == 0) fail_data("coding matrix of image '" + ids[m] + "' has wrong shape");
        for (std::size_t i = 0; i < H.rows(); ++i) {
            auto r = H.row(i);
            double s = 0.0;
            std::size_t ones = 0;
            for (double v : r) {
                s += v;
                if (scheme == Scheme::hard) {
                    if (v == 1.0) ++ones;
                    else if (v != 0.0) fail_data("hard coding row is not one-hot in image '" + ids[m] + "'");
                } else if (!(v >= 0.0) || !std::isfinite(v)) {
                    fail_data("soft coding row has a negative coefficient in image '" + ids[m] + "'");
                }
            }
            if (scheme == Scheme::hard && ones != 1) fail_data("hard coding row is not one-hot in image '" + ids[m] + "'");
            if (scheme == Scheme::soft && std::abs(s - 1.0) > 1e-12) {
                fail_data("soft coding row does not sum to 1 in image '" + ids[m] + "' row " + std::to_string(i));
            }
        }
    }
    CodingMatrix cm;
    cm.per_image_ = std::move(per_image);
    cm.scheme_ = scheme;
    cm.softness_ = softness;
    cm.metric_ = metric;
    cm.ids_ = std::move(ids);
    cm.labels_ = std::move(labels);
    return cm;
}

std::size_t CodingMatrix::words() const noexcept {
    return per_image_.empty() ? 0 : per_image_.front().cols();
}

// ---------------------------------------------------------------------------

void check_word_subset(std::span<const WordIndex> words, std::size_t K, const char* what) {
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i] < 1 || (K != 0 && words[i] > K)) {
            fail_data(std::string(what) + ": word index " + std::to_string(words[i]) + " out of range");
        }
        if (i > 0 && words[i] <= words[i - 1]) fail_data(std::string(what) + ": word indices must be ascending");
    }
}

namespace {

void check_row(std::span<const double> values, const char* what) {
    double s = 0.0;
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) fail_data(std::string(what) + ": negative or non-finite entry");
        s += v;
    }
    if (std::abs(s - 1.0) > Representation::sum_tolerance) {
        fail_data(std::string(what) + ": entries sum to " + std::to_string(s) + ", expected 1");
    }
}

} // namespace

Representation Representation::make(std::vector<double> values, std::vector<WordIndex> active_words) {
    if (values.size() != active_words.size() || values.empty()) {
        fail_data("representation: value count does not match active word count");
    }
    check_word_subset(active_words, 0, "representation");
    check_row(values, "representation");
    Representation r;
    r.values_ = std::move(values);
    r.active_ = std::move(active_words);
    return r;
}

double Representation::at_word(WordIndex w) const {
    auto it = std::lower_bound(active_.begin(), active_.end(), w);
    if (it == active_.end() || *it != w) fail_data("word " + std::to_string(w) + " is not active");
    return values_[static_cast<std::size_t>(it - active_.begin())];
}

double Representation::sum() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

RepresentationMatrix RepresentationMatrix::make(Matrix values, std::vector<WordIndex> active_words,
                                                std::vector<std::string> ids,
                                                std::vector<std::string> labels) {
    if (values.cols() != active_words.size() || active_words.empty()) {
        fail_data("representation matrix: column count does not match active word count");
    }
    if (ids.size() != values.rows() || labels.size() != values.rows()) {
        fail_data("representation matrix: ids/labels do not match row count");
    }
    check_word_subset(active_words, 0, "representation matrix");
    for (std::size_t i = 0; i < values.rows(); ++i) check_row(values.row(i), "representation matrix row");
    RepresentationMatrix m;
    m.values_ = std::move(values);
    m.active_ = std::move(active_words);
    m.ids_ = std::move(ids);
    m.labels_ = std::move(labels);
    return m;
}

Representation RepresentationMatrix::row(std::size_t i) const {
    auto r = values_.row(i);
    return Representation::make({r.begin(), r.end()}, active_);
}

} // namespace wordprune

#pragma once

// Domain types shared by every stage of the pipeline.
//
// Word indices are 1-based throughout the library (the index set of a
// codebook with K words is {1..K}). File formats use 0-based indices and
// are translated in io.cpp.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wordprune {

/// Error category; maps onto the CLI exit codes.
enum class ErrorKind { usage = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail_usage(const std::string& msg);
[[noreturn]] void fail_data(const std::string& msg);
[[noreturn]] void fail_numerical(const std::string& msg);

/// 1-based visual word index.
using WordIndex = std::size_t;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }

    void append_row(std::span<const double> values);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Metric { squared_euclidean, euclidean, manhattan };

[[nodiscard]] std::string to_string(Metric m);
[[nodiscard]] Metric parse_metric(const std::string& name);

enum class Scheme { hard, soft };

[[nodiscard]] std::string to_string(Scheme s);
[[nodiscard]] Scheme parse_scheme(const std::string& name);

struct Image {
    std::string id;
    std::string label;
    Matrix descriptors; // N x d
    friend bool operator==(const Image&, const Image&) = default;
};

/// Unvalidated corpus as read from disk; rows may be ragged.
struct RawImage {
    std::string id;
    std::string label;
    std::vector<std::vector<double>> rows;
};

struct RawCorpus {
    std::size_t dim = 0;
    std::vector<std::string> classes;
    std::vector<RawImage> images;
};

class DescriptorCorpus {
public:
    /// Checks every invariant and reports the first violation with the image id.
    static DescriptorCorpus validate(RawCorpus raw);
    static DescriptorCorpus validate(std::size_t dim, std::vector<std::string> classes,
                                     std::vector<Image> images);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<std::string>& classes() const noexcept { return classes_; }
    [[nodiscard]] const std::vector<Image>& images() const noexcept { return images_; }
    [[nodiscard]] std::size_t size() const noexcept { return images_.size(); }
    [[nodiscard]] std::size_t total_descriptors() const noexcept;

    /// Sub-corpus holding the given image positions (0-based), order preserved.
    [[nodiscard]] DescriptorCorpus subset(std::span<const std::size_t> positions) const;

    friend bool operator==(const DescriptorCorpus&, const DescriptorCorpus&) = default;

private:
    DescriptorCorpus() = default;
    std::size_t dim_ = 0;
    std::vector<std::string> classes_;
    std::vector<Image> images_;
};

/// Ordered set of K centroids; index set is 1..K.
///
/// K >= 1 is accepted here so that restricted codebooks (a single surviving
/// word) remain representable; codebooks produced by k-means have K >= 2.
class Codebook {
public:
    static Codebook from_centroids(Matrix centroids, Metric metric = Metric::squared_euclidean);

    [[nodiscard]] std::size_t size() const noexcept { return centroids_.rows(); }
    [[nodiscard]] std::size_t dim() const noexcept { return centroids_.cols(); }
    [[nodiscard]] Metric metric() const noexcept { return metric_; }
    [[nodiscard]] const Matrix& centroids() const noexcept { return centroids_; }
    [[nodiscard]] std::span<const double> centroid(WordIndex k) const {
        return centroids_.row(k - 1);
    }
    [[nodiscard]] std::vector<WordIndex> index_set() const;

    /// Codebook holding only `words` (renumbered 1..|words| in the given order).
    [[nodiscard]] Codebook restrict(std::span<const WordIndex> words) const;

    friend bool operator==(const Codebook&, const Codebook&) = default;

private:
    Codebook() = default;
    Matrix centroids_;
    Metric metric_ = Metric::squared_euclidean;
};

/// Per-word neighbor lists ordered by ascending distance, ties by index.
///
/// `m` is the neighborhood size used by the transfer heuristic; each list
/// may be longer (`depth() >= m`) so pruning can top up from it when some of
/// the first m neighbors have already been removed.
class NeighborTable {
public:
    NeighborTable() = default;
    NeighborTable(std::size_t m, std::vector<std::vector<WordIndex>> lists);

    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] std::size_t depth() const noexcept { return lists_.empty() ? 0 : lists_.front().size(); }
    [[nodiscard]] std::size_t words() const noexcept { return lists_.size(); }

    /// First m entries of word l's list.
    [[nodiscard]] std::span<const WordIndex> nearest(WordIndex l) const;
    /// The whole (extended) list of word l.
    [[nodiscard]] std::span<const WordIndex> extended(WordIndex l) const;

    friend bool operator==(const NeighborTable&, const NeighborTable&) = default;

private:
    std::size_t m_ = 0;
    std::vector<std::vector<WordIndex>> lists_;
};

/// Retained per-descriptor coding coefficients of every image.
class CodingMatrix {
public:
    static CodingMatrix make(std::vector<Matrix> per_image, Scheme scheme, double softness,
                             Metric metric, std::vector<std::string> ids,
                             std::vector<std::string> labels);

    [[nodiscard]] const std::vector<Matrix>& per_image() const noexcept { return per_image_; }
    [[nodiscard]] Scheme scheme() const noexcept { return scheme_; }
    [[nodiscard]] double softness() const noexcept { return softness_; }
    [[nodiscard]] Metric metric() const noexcept { return metric_; }
    [[nodiscard]] std::size_t words() const noexcept;
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    friend bool operator==(const CodingMatrix&, const CodingMatrix&) = default;

private:
    CodingMatrix() = default;
    std::vector<Matrix> per_image_;
    Scheme scheme_ = Scheme::hard;
    double softness_ = 0.0;
    Metric metric_ = Metric::squared_euclidean;
    std::vector<std::string> ids_;
    std::vector<std::string> labels_;
};

/// Pooled vector of one image over an ordered subset of active words.
class Representation {
public:
    static constexpr double sum_tolerance = 1e-9;

    static Representation make(std::vector<double> values, std::vector<WordIndex> active_words);

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<WordIndex>& active_words() const noexcept { return active_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    /// Value of the bin for word `w`; throws if `w` is not active.
    [[nodiscard]] double at_word(WordIndex w) const;
    [[nodiscard]] double sum() const noexcept;

private:
    Representation() = default;
    std::vector<double> values_;
    std::vector<WordIndex> active_;
};

/// One representation per image, all over the same active words.
class RepresentationMatrix {
public:
    static RepresentationMatrix make(Matrix values, std::vector<WordIndex> active_words,
                                     std::vector<std::string> ids, std::vector<std::string> labels);

    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<WordIndex>& active_words() const noexcept { return active_; }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.rows(); }
    [[nodiscard]] Representation row(std::size_t i) const;

    friend bool operator==(const RepresentationMatrix&, const RepresentationMatrix&) = default;

private:
    RepresentationMatrix() = default;
    Matrix values_;
    std::vector<WordIndex> active_;
    std::vector<std::string> ids_;
    std::vector<std::string> labels_;
};

/// Checks that `words` is strictly ascending with entries in 1..K.
void check_word_subset(std::span<const WordIndex> words, std::size_t K, const char* what);

} // namespace wordprune

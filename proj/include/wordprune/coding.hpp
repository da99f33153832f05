#pragma once

// Forward BoW pipeline: hard/soft coding followed by average pooling.
//
// This is also the brute-force path that every pruning shortcut is checked
// against: pruning a codebook and calling encode_corpus again is the
// "re-code and re-pool" reference.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wordprune/core.hpp"

namespace wordprune {

/// N x K one-hot rows; ties go to the lowest word index.
[[nodiscard]] Matrix hard_code(const Image& image, const Codebook& codebook);

/// N x K rows h_ik = exp(-beta d_ik) / sum_j exp(-beta d_ij).
[[nodiscard]] Matrix soft_code(const Image& image, const Codebook& codebook, double softness);

/// Soft assignment of one descriptor given its distances to all words.
/// Uses the max-shift form so large beta*distance does not underflow to 0/0.
void soft_assign(std::span<const double> distances, double softness, std::span<double> out);

/// Index (0-based) of the smallest distance, lowest index on ties.
[[nodiscard]] std::size_t nearest_word(std::span<const double> distances) noexcept;

/// Entry-wise mean of the coding rows.
[[nodiscard]] Representation average_pool(const Matrix& rows, std::vector<WordIndex> active_words);
[[nodiscard]] Representation average_pool(const Matrix& rows);

struct EncodeOptions {
    Scheme scheme = Scheme::hard;
    double softness = 0.0; ///< beta, soft scheme only
    bool retain_coding = false;
};

struct EncodedCorpus {
    RepresentationMatrix representations;
    std::optional<CodingMatrix> coding;
    std::uint64_t distance_evaluations = 0; ///< exactly sum_i N_i * K
};

[[nodiscard]] EncodedCorpus encode_corpus(const DescriptorCorpus& corpus, const Codebook& codebook,
                                          const EncodeOptions& options);

} // namespace wordprune

#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "wordprune/core.hpp"

namespace testutil {

inline wordprune::Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    wordprune::Matrix m;
    for (const auto& r : rows) m.append_row(std::vector<double>(r));
    return m;
}

inline wordprune::Codebook codebook(std::initializer_list<std::initializer_list<double>> rows) {
    return wordprune::Codebook::from_centroids(mat(rows));
}

inline wordprune::Image image(std::string id, std::string label, wordprune::Matrix d) {
    return {std::move(id), std::move(label), std::move(d)};
}

inline std::vector<wordprune::WordIndex> iota_words(std::size_t K) {
    std::vector<wordprune::WordIndex> w(K);
    for (std::size_t k = 0; k < K; ++k) w[k] = k + 1;
    return w;
}

/// Representation matrix over words 1..K with generated ids.
inline wordprune::RepresentationMatrix reps(const std::vector<std::vector<double>>& rows,
                                            std::vector<std::string> labels = {}) {
    wordprune::Matrix m;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        m.append_row(rows[i]);
        ids.push_back("img" + std::to_string(i));
    }
    if (labels.empty()) labels.assign(rows.size(), "a");
    return wordprune::RepresentationMatrix::make(std::move(m), iota_words(rows.front().size()), std::move(ids),
                                                 std::move(labels));
}

} // namespace testutil

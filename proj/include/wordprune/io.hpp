#pragma once

// On-disk formats. Word indices are 0-based in every file and 1-based
// in memory; the translation happens here and nowhere else.
//
// Descriptor corpus, text form: a directory with `index.txt`
// classes <label> <label> ...
// <relative path of image file>
// ...
// and one file per image: header line `d N label id`, then N lines of d
// whitespace-separated decimals. Lines starting with '#' are ignored in the
// index.
//
// Descriptor corpus, binary form: "PBW1", uint32 LE header length, JSON
// header {"dim", "classes", "images": [{"id","label","n"}]}, then each
// image's n x d matrix as little-endian float32, row-major, in header order.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "wordprune/classifier.hpp"
#include "wordprune/core.hpp"
#include "wordprune/scoring.hpp"
#include "wordprune/selection.hpp"

namespace wordprune::io {

namespace fs = std::filesystem;
using nlohmann::json;

[[nodiscard]] DescriptorCorpus read_corpus(const fs::path& path);
void write_corpus_text(const fs::path& dir, const DescriptorCorpus& corpus);
void write_corpus_binary(const fs::path& file, const DescriptorCorpus& corpus);

struct CodebookFile {
    Codebook codebook;
    std::optional<NeighborTable> neighbors;
    std::uint64_t seed = 0;
};

void write_codebook(const fs::path& file, const Codebook& codebook, const NeighborTable* neighbors,
                    std::uint64_t seed);
[[nodiscard]] CodebookFile read_codebook(const fs::path& file);

/// CSV: `id,label,w<idx>...` with 0-based word indices in the column names.
void write_representations(const fs::path& file, const RepresentationMatrix& reps);
[[nodiscard]] RepresentationMatrix read_representations(const fs::path& file);

/// CSV: `id,label,row,w0..w(K-1)`; a comment line `# scheme=soft beta=<b> metric=<m>` first.
void write_coding(const fs::path& file, const CodingMatrix& coding);
[[nodiscard]] CodingMatrix read_coding(const fs::path& file);

void write_trace(const fs::path& file, const std::vector<TraceRow>& trace);

[[nodiscard]] json subset_json(const std::vector<WordIndex>& surviving, std::size_t K, double energy);
/// Surviving words (1-based) from a subset file.
[[nodiscard]] std::vector<WordIndex> read_subset(const fs::path& file);

[[nodiscard]] json score_report_json(const ScoreReport& report);
[[nodiscard]] json model_json(const LinearModel& model);
[[nodiscard]] LinearModel model_from_json(const json& j);

/// Key-value run configuration: `key = value` lines, '#' comments.
using Config = std::map<std::string, std::string>;
[[nodiscard]] Config read_config(const fs::path& file);
[[nodiscard]] std::string config_text(const Config& config);

/// Canonical JSON text (sorted keys, 2-space indent, trailing newline).
void write_json(const fs::path& file, const json& j);
[[nodiscard]] json read_json(const fs::path& file);
void write_text(const fs::path& file, const std::string& text);
[[nodiscard]] std::string read_text(const fs::path& file);

/// Shortest decimal form that reads back to the same double.
[[nodiscard]] std::string format_double(double v);

/// 64-bit FNV-1a, hex encoded.
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

[[nodiscard]] std::string base64_encode(std::span<const unsigned char> bytes);
[[nodiscard]] std::vector<unsigned char> base64_decode(const std::string& text);

} // namespace wordprune::io

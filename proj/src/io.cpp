#include "wordprune/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

namespace wordprune::io {

namespace {

constexpr char kMagic[4] = {'P', 'B', 'W', '1'};

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) fail_data(where + ": cannot parse number '" + s + "'");
    return v;
}

std::size_t parse_size(const std::string& s, const std::string& where) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail_data(where + ": cannot parse integer '" + s + "'");
    return v;
}

void check_token(const std::string& s, const char* what) {
    if (s.empty() || std::any_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == ','; })) {
        fail_data(std::string(what) + " '" + s + "' must be non-empty without whitespace or commas");
    }
}

std::ifstream open_in(const fs::path& p, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(p, mode);
    if (!in) fail_data("cannot open '" + p.string() + "'");
    return in;
}

std::ofstream open_out(const fs::path& p, std::ios::openmode mode = std::ios::out) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, mode | std::ios::trunc);
    if (!out) fail_data("cannot write '" + p.string() + "'");
    return out;
}

std::uint32_t read_u32_le(const unsigned char* b) {
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

DescriptorCorpus read_corpus_text(const fs::path& dir) {
    const fs::path index = dir / "index.txt";
    auto in = open_in(index);
    RawCorpus raw;
    bool have_classes = false;
    for (std::string line; std::getline(in, line);) {
        auto toks = split_ws(line);
        if (toks.empty() || toks[0].starts_with('#')) continue;
        if (!have_classes) {
            if (toks[0] != "classes") fail_data(index.string() + ": first entry must be 'classes <labels...>'");
            raw.classes.assign(toks.begin() + 1, toks.end());
            have_classes = true;
            continue;
        }
        const fs::path file = dir / toks[0];
        auto img_in = open_in(file);
        std::string header;
        if (!std::getline(img_in, header)) fail_data(file.string() + ": missing header");
        auto h = split_ws(header);
        if (h.size() != 4) fail_data(file.string() + ": header must be 'd N label id'");
        const std::size_t d = parse_size(h[0], file.string());
        const std::size_t n = parse_size(h[1], file.string());
        RawImage ri{h[3], h[2], {}};
        if (raw.dim == 0) raw.dim = d;
        if (d != raw.dim) {
            fail_data("image '" + ri.id + "' declares dimension " + std::to_string(d) + ", corpus has " +
                      std::to_string(raw.dim));
        }
        for (std::string row; ri.rows.size() < n && std::getline(img_in, row);) {
            auto vals = split_ws(row);
            if (vals.empty()) continue;
            std::vector<double> r;
            for (const auto& v : vals) r.push_back(parse_double(v, "image '" + ri.id + "'"));
            ri.rows.push_back(std::move(r));
        }
        if (ri.rows.size() != n) {
            fail_data("image '" + ri.id + "' declares " + std::to_string(n) + " descriptors but has " +
                      std::to_string(ri.rows.size()));
        }
        raw.images.push_back(std::move(ri));
    }
    if (!have_classes) fail_data(index.string() + ": empty index");
    return DescriptorCorpus::validate(std::move(raw));
}

DescriptorCorpus read_corpus_binary(const fs::path& file) {
    auto in = open_in(file, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) fail_data(file.string() + ": not a PBW1 file");
    const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t hlen = read_u32_le(u + 4);
    if (bytes.size() < 8ull + hlen) fail_data(file.string() + ": truncated header");
    json header;
    try {
        header = json::parse(bytes.substr(8, hlen));
    } catch (const json::exception& e) {
        fail_data(file.string() + ": bad JSON header: " + e.what());
    }
    RawCorpus raw;
    raw.dim = header.at("dim").get<std::size_t>();
    raw.classes = header.at("classes").get<std::vector<std::string>>();
    std::size_t offset = 8 + hlen;
    for (const auto& im : header.at("images")) {
        RawImage ri{im.at("id").get<std::string>(), im.at("label").get<std::string>(), {}};
        const std::size_t n = im.at("n").get<std::size_t>();
        if (bytes.size() < offset + n * raw.dim * 4) fail_data(file.string() + ": truncated data for image '" + ri.id + "'");
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row(raw.dim);
            for (std::size_t j = 0; j < raw.dim; ++j, offset += 4) {
                row[j] = static_cast<double>(std::bit_cast<float>(read_u32_le(u + offset)));
            }
            ri.rows.push_back(std::move(row));
        }
        raw.images.push_back(std::move(ri));
    }
    if (offset != bytes.size()) fail_data(file.string() + ": trailing bytes after the last image");
    return DescriptorCorpus::validate(std::move(raw));
}

std::string word_column(WordIndex w) { return "w" + std::to_string(w - 1); }

WordIndex parse_word_column(const std::string& name, const std::string& where) {
    if (name.size() < 2 || name[0] != 'w') fail_data(where + ": bad word column '" + name + "'");
    return parse_size(name.substr(1), where) + 1;
}

} // namespace

// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string base64_encode(std::span<const unsigned char> bytes) {
    using namespace boost::archive::iterators;
    using It = base64_from_binary<transform_width<const unsigned char*, 6, 8>>;
    std::string out(It(bytes.data()), It(bytes.data() + bytes.size()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    using namespace boost::archive::iterators;
    using It = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
    std::string body = text;
    std::size_t pad = 0;
    while (!body.empty() && body.back() == '=') {
        body.pop_back();
        ++pad;
    }
    if (pad > 2) fail_data("malformed base64 payload");
    std::vector<unsigned char> out;
    try {
        out.assign(It(body.cbegin()), It(body.cend()));
    } catch (const std::exception&) {
        fail_data("malformed base64 payload");
    }
    return out;
}

DescriptorCorpus read_corpus(const fs::path& path) {
    if (fs::is_directory(path)) return read_corpus_text(path);
    if (!fs::exists(path)) fail_data("corpus '" + path.string() + "' does not exist");
    return read_corpus_binary(path);
}

void write_corpus_text(const fs::path& dir, const DescriptorCorpus& corpus) {
    fs::create_directories(dir);
    std::string index = "# wordprune descriptor corpus\nclasses";
    for (const auto& c : corpus.classes()) {
        check_token(c, "class label");
        index += " " + c;
    }
    index += "\n";
    for (const auto& img : corpus.images()) {
        check_token(img.id, "image id");
        const std::string name = img.id + ".txt";
        index += name + "\n";
        std::string body = std::to_string(corpus.dim()) + " " + std::to_string(img.descriptors.rows()) + " " +
                           img.label + " " + img.id + "\n";
        for (std::size_t i = 0; i < img.descriptors.rows(); ++i) {
            auto r = img.descriptors.row(i);
            for (std::size_t j = 0; j < r.size(); ++j) body += (j ? " " : "") + format_double(r[j]);
            body += "\n";
        }
        write_text(dir / name, body);
    }
    write_text(dir / "index.txt", index);
}

void write_corpus_binary(const fs::path& file, const DescriptorCorpus& corpus) {
    json header;
    header["dim"] = corpus.dim();
    header["classes"] = corpus.classes();
    header["images"] = json::array();
    for (const auto& img : corpus.images()) {
        header["images"].push_back({{"id", img.id}, {"label", img.label}, {"n", img.descriptors.rows()}});
    }
    const std::string h = header.dump();
    std::string out(kMagic, 4);
    put_u32_le(out, static_cast<std::uint32_t>(h.size()));
    out += h;
    for (const auto& img : corpus.images()) {
        for (double v : img.descriptors.data()) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    auto o = open_out(file, std::ios::binary);
    o.write(out.data(), static_cast<std::streamsize>(out.size()));
}

// ---------------------------------------------------------------------------

void write_codebook(const fs::path& file, const Codebook& codebook, const NeighborTable* neighbors,
                    std::uint64_t seed) {
    std::vector<unsigned char> bytes;
    bytes.reserve(codebook.centroids().data().size() * 8);
    for (double v : codebook.centroids().data()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
    }
    json j;
    j["format"] = "wordprune-codebook";
    j["version"] = 1;
    j["K"] = codebook.size();
    j["d"] = codebook.dim();
    j["metric"] = to_string(codebook.metric());
    j["seed"] = seed;
    j["dtype"] = "float64-le";
    j["centroids"] = base64_encode(bytes);
    if (neighbors) {
        json lists = json::array();
        for (WordIndex l = 1; l <= neighbors->words(); ++l) {
            json row = json::array();
            for (WordIndex k : neighbors->extended(l)) row.push_back(k - 1);
            lists.push_back(row);
        }
        j["neighbors"] = {{"m", neighbors->m()}, {"depth", neighbors->depth()}, {"lists", lists}};
    }
    write_json(file, j);
}

CodebookFile read_codebook(const fs::path& file) {
    const json j = read_json(file);
    try {
        if (j.at("format") != "wordprune-codebook") fail_data(file.string() + ": not a codebook file");
        const std::size_t K = j.at("K").get<std::size_t>();
        const std::size_t d = j.at("d").get<std::size_t>();
        const auto bytes = base64_decode(j.at("centroids").get<std::string>());
        if (bytes.size() != K * d * 8) fail_data(file.string() + ": centroid payload has the wrong size");
        Matrix c(K, d);
        for (std::size_t i = 0; i < K * d; ++i) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
            c.data()[i] = std::bit_cast<double>(bits);
        }
        CodebookFile out{Codebook::from_centroids(std::move(c), parse_metric(j.at("metric").get<std::string>())),
                         std::nullopt, j.value("seed", std::uint64_t{0})};
        if (j.contains("neighbors")) {
            const auto& nb = j.at("neighbors");
            std::vector<std::vector<WordIndex>> lists;
            for (const auto& row : nb.at("lists")) {
                std::vector<WordIndex> r;
                for (const auto& v : row) r.push_back(v.get<WordIndex>() + 1);
                lists.push_back(std::move(r));
            }
            if (lists.size() != K) fail_data(file.string() + ": neighbor table does not cover every word");
            out.neighbors = NeighborTable(nb.at("m").get<std::size_t>(), std::move(lists));
        }
        return out;
    } catch (const json::exception& e) {
        fail_data(file.string() + ": malformed codebook: " + e.what());
    }
}

// ---------------------------------------------------------------------------

void write_representations(const fs::path& file, const RepresentationMatrix& reps) {
    std::string out = "id,label";
    for (WordIndex w : reps.active_words()) out += "," + word_column(w);
    out += "\n";
    for (std::size_t i = 0; i < reps.size(); ++i) {
        check_token(reps.ids()[i], "image id");
        check_token(reps.labels()[i], "label");
        out += reps.ids()[i] + "," + reps.labels()[i];
        for (double v : reps.values().row(i)) out += "," + format_double(v);
        out += "\n";
    }
    write_text(file, out);
}

RepresentationMatrix read_representations(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    if (!std::getline(in, line)) fail_data(file.string() + ": empty representation file");
    auto head = split_csv(line);
    if (head.size() < 3 || head[0] != "id" || head[1] != "label") fail_data(file.string() + ": bad header");
    std::vector<WordIndex> words;
    for (std::size_t c = 2; c < head.size(); ++c) words.push_back(parse_word_column(head[c], file.string()));
    Matrix values(0, 0);
    std::vector<std::string> ids, labels;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv(line);
        if (cells.size() != head.size()) fail_data(file.string() + ": row has " + std::to_string(cells.size()) + " cells");
        ids.push_back(cells[0]);
        labels.push_back(cells[1]);
        std::vector<double> row;
        for (std::size_t c = 2; c < cells.size(); ++c) row.push_back(parse_double(cells[c], file.string()));
        if (values.rows() == 0) values = Matrix(0, row.size());
        values.append_row(row);
    }
    return RepresentationMatrix::make(std::move(values), std::move(words), std::move(ids), std::move(labels));
}

void write_coding(const fs::path& file, const CodingMatrix& coding) {
    std::string out = "# scheme=" + to_string(coding.scheme()) + " beta=" + format_double(coding.softness()) +
                      " metric=" + to_string(coding.metric()) + "\n";
    out += "id,label,row";
    for (WordIndex w = 1; w <= coding.words(); ++w) out += "," + word_column(w);
    out += "\n";
    for (std::size_t m = 0; m < coding.per_image().size(); ++m) {
        const Matrix& H = coding.per_image()[m];
        for (std::size_t i = 0; i < H.rows(); ++i) {
            out += coding.ids()[m] + "," + coding.labels()[m] + "," + std::to_string(i);
            for (double v : H.row(i)) out += "," + format_double(v);
            out += "\n";
        }
    }
    write_text(file, out);
}

CodingMatrix read_coding(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("# ")) fail_data(file.string() + ": missing coding metadata line");
    std::map<std::string, std::string> meta;
    for (const auto& tok : split_ws(line.substr(2))) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (!meta.contains("scheme") || !meta.contains("beta") || !meta.contains("metric")) {
        fail_data(file.string() + ": coding metadata needs scheme, beta and metric");
    }
    if (!std::getline(in, line)) fail_data(file.string() + ": missing header");
    const auto head = split_csv(line);
    if (head.size() < 4 || head[0] != "id" || head[1] != "label" || head[2] != "row") fail_data(file.string() + ": bad header");
    const std::size_t K = head.size() - 3;
    std::vector<Matrix> per_image;
    std::vector<std::string> ids, labels;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv(line);
        if (cells.size() != head.size()) fail_data(file.string() + ": malformed coding row");
        if (ids.empty() || ids.back() != cells[0]) {
            ids.push_back(cells[0]);
            labels.push_back(cells[1]);
            per_image.emplace_back(0, K);
        }
        std::vector<double> row;
        for (std::size_t c = 3; c < cells.size(); ++c) row.push_back(parse_double(cells[c], file.string()));
        per_image.back().append_row(row);
    }
    return CodingMatrix::make(std::move(per_image), parse_scheme(meta["scheme"]), parse_double(meta["beta"], file.string()),
                              parse_metric(meta["metric"]), std::move(ids), std::move(labels));
}

void write_trace(const fs::path& file, const std::vector<TraceRow>& trace) {
    std::string out = "t,energy,accepted,temperature,current_energy\n";
    for (const auto& r : trace) {
        out += std::to_string(r.t) + "," + format_double(r.energy) + "," + (r.accepted ? "1" : "0") + "," +
               format_double(r.temperature) + "," + format_double(r.current_energy) + "\n";
    }
    write_text(file, out);
}

json subset_json(const std::vector<WordIndex>& surviving, std::size_t K, double energy) {
    std::vector<std::size_t> keep, pruned;
    std::vector<char> in(K + 1, 0);
    for (WordIndex w : surviving) {
        keep.push_back(w - 1);
        in[w] = 1;
    }
    for (WordIndex w = 1; w <= K; ++w) {
        if (!in[w]) pruned.push_back(w - 1);
    }
    return {{"K", K}, {"surviving", keep}, {"pruned", pruned}, {"energy", energy}};
}

std::vector<WordIndex> read_subset(const fs::path& file) {
    const json j = read_json(file);
    std::vector<WordIndex> out;
    try {
        for (const auto& v : j.at("surviving")) out.push_back(v.get<WordIndex>() + 1);
    } catch (const json::exception& e) {
        fail_data(file.string() + ": malformed subset file: " + e.what());
    }
    std::sort(out.begin(), out.end());
    return out;
}

json score_report_json(const ScoreReport& r) {
    json bins = json::array();
    for (std::size_t k = 0; k < r.words.size(); ++k) {
        json fits = json::array();
        for (const auto& f : r.class_fits[k]) fits.push_back({{"alpha", f.alpha}, {"beta", f.beta}});
        bins.push_back({{"word", r.words[k] - 1},
                        {"mutual_information", r.per_bin[k]},
                        {"degenerate", static_cast<bool>(r.degenerate[k])},
                        {"marginal_fit", {{"alpha", r.marginal_fits[k].alpha},
                                          {"beta", r.marginal_fits[k].beta},
                                          {"converged", r.marginal_fits[k].converged},
                                          {"clamped", r.marginal_fits[k].clamped}}},
                        {"class_fits", fits}});
    }
    return {{"score", r.score},
            {"classes", r.classes},
            {"class_priors", r.class_priors},
            {"degenerate_bins", r.degenerate_bins},
            {"clamped_values", r.clamped_values},
            {"bins", bins}};
}

json model_json(const LinearModel& m) {
    std::vector<std::size_t> words;
    for (WordIndex w : m.active_words) words.push_back(w - 1);
    return {{"classes", m.classes},       {"active_words", words}, {"feature_mean", m.feature_mean},
            {"feature_scale", m.feature_scale}, {"weights", m.weights}, {"bias", m.bias},
            {"C", m.regularization},      {"epochs", m.epochs},    {"seed", m.seed}};
}

LinearModel model_from_json(const json& j) {
    LinearModel m;
    try {
        m.classes = j.at("classes").get<std::vector<std::string>>();
        for (const auto& w : j.at("active_words")) m.active_words.push_back(w.get<WordIndex>() + 1);
        m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
        m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
        m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        m.bias = j.at("bias").get<std::vector<double>>();
        m.regularization = j.at("C").get<double>();
        m.epochs = j.at("epochs").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        fail_data(std::string("malformed model: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------

Config read_config(const fs::path& file) {
    auto in = open_in(file);
    Config c;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_usage(file.string() + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        c[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return c;
}

std::string config_text(const Config& config) {
    std::string out;
    for (const auto& [k, v] : config) out += k + " = " + v + "\n";
    return out;
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

json read_json(const fs::path& file) {
    try {
        return json::parse(read_text(file));
    } catch (const json::exception& e) {
        fail_data(file.string() + ": invalid JSON: " + e.what());
    }
}

void write_text(const fs::path& file, const std::string& text) {
    auto out = open_out(file, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string read_text(const fs::path& file) {
    auto in = open_in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace wordprune::io

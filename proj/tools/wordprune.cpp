// wordprune: build codebooks, encode corpora, select and evaluate pruned
// vocabularies, run the synthetic checks. Every command writes into its own run
// directory: the outputs, the resolved config and a manifest for replay.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wordprune/classifier.hpp"
#include "wordprune/codebook_builder.hpp"
#include "wordprune/coding.hpp"
#include "wordprune/io.hpp"
#include "wordprune/parallel.hpp"
#include "wordprune/pruning.hpp"
#include "wordprune/scoring.hpp"
#include "wordprune/selection.hpp"
#include "wordprune/validation.hpp"

#ifndef WORDPRUNE_VERSION
#define WORDPRUNE_VERSION "0.0.0"
#endif

using namespace wordprune;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Key {
    std::string name;
    std::string fallback; ///< empty: no default
    std::string help;
    bool path = false;    ///< input file or directory, hashed into the manifest
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Key> keys;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> all{
        {"build-codebook",
         "k-means codebook plus nearest-neighbor table",
         {{"corpus", "", "descriptor corpus (directory or PBW1 file)", true},
          {"k", "", "number of visual words"},
          {"seed", "0", "k-means seed"},
          {"max_iter", "100", "k-means iteration cap"},
          {"tol", "1e-06", "stop when the mean centroid shift drops below this"},
          {"metric", "sqeuclidean", "sqeuclidean | euclidean | manhattan"},
          {"m", "5", "neighbors receiving a pruned word's mass"},
          {"depth", "full", "stored neighbor list length: full (K-1) or a number >= m"}}},
        {"encode",
         "hard or soft coding with average pooling",
         {{"corpus", "", "descriptor corpus", true},
          {"codebook", "", "codebook file", true},
          {"scheme", "hard", "hard | soft"},
          {"beta", "", "soft-coding softness (required for soft)"},
          {"retain", "auto", "keep the per-descriptor coding matrix: auto (soft only) | yes | no"}}},
        {"select",
         "simulated-annealing search for a fixed-size word subset",
         {{"reps", "", "hard-coded representations (hard scheme)", true},
          {"coding", "", "retained coding matrix (soft scheme)", true},
          {"codebook", "", "codebook file (neighbor table)", true},
          {"target_size", "", "number of surviving words |T|"},
          {"lambda", "0.9", "cooling factor, temperature lambda^t"},
          {"tmax", "auto", "iterations: auto = 100 hard, 500 soft"},
          {"move_size", "10", "members replaced per move (capped at target_size)"},
          {"m", "5", "neighbors receiving a pruned word's mass"},
          {"chain", "initial", "initial | previous (hard only)"},
          {"marginal", "class-mixture", "class-mixture | beta-fit"},
          {"seed", "0", "search seed"}}},
        {"eval",
         "linear classifier on full or pruned representations",
         {{"train", "", "training representations", true},
          {"test", "", "test representations", true},
          {"codebook", "", "codebook file (needed with a subset)", true},
          {"subset", "", "subset file; omit for the full codebook", true},
          {"method", "psi", "psi | exact-psi | discard"},
          {"m", "5", "neighbors receiving a pruned word's mass (psi)"},
          {"sigma", "", "isotropic spread of each word's descriptors (exact-psi)"},
          {"lambda_samples", "100000", "Monte-Carlo samples per pruned word (exact-psi)"},
          {"c", "1", "classifier regularization C"},
          {"epochs", "50", "classifier epochs"},
          {"seed", "0", "seed"}}},
        {"validate",
         "synthetic checks against brute-force re-coding",
         {{"experiment", "", "prop1 | variance | claim2 | heuristic-gap"},
          {"codebook", "", "mixture means (prop1, variance, heuristic-gap)", true},
          {"sigma", "1", "mixture spread (prop1, variance)"},
          {"pruned", "1", "word to prune"},
          {"descriptors", "10000", "descriptors per trial"},
          {"trials", "auto", "trials: auto = 200 prop1, 1000 variance"},
          {"lambda_samples", "1000000", "Monte-Carlo samples for the transition weights"},
          {"instances", "50", "claim2 instances"},
          {"sigmas", "0.5,1,2", "heuristic-gap spreads"},
          {"ms", "1,2,5", "heuristic-gap neighbor counts"},
          {"seed", "0", "seed"}}},
    };
    return all;
}

const Command& command(const std::string& name) {
    for (const auto& c : commands()) {
        if (c.name == name) return c;
    }
    throw Error(ErrorKind::usage, "unknown command '" + name + "'");
}

std::string flag_of(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

// ---- config values ----------------------------------------------------------

class Values {
public:
    explicit Values(const io::Config& c) : c_(c) {}

    bool has(const std::string& k) const { return c_.count(k) && !c_.at(k).empty(); }
    const std::string& str(const std::string& k) const {
        if (!has(k)) throw Error(ErrorKind::usage, "missing required option " + flag_of(k));
        return c_.at(k);
    }
    double num(const std::string& k) const {
        const auto& s = str(k);
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw Error(ErrorKind::usage, flag_of(k) + ": not a number: '" + s + "'");
    }
    std::uint64_t count(const std::string& k) const {
        const auto& s = str(k);
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw Error(ErrorKind::usage, flag_of(k) + ": not a non-negative integer: '" + s + "'");
        }
        return std::stoull(s);
    }
    template <class T>
    std::vector<T> list(const std::string& k) const {
        std::vector<T> out;
        std::stringstream ss(str(k));
        std::string item;
        while (std::getline(ss, item, ',')) {
            Values one(io::Config{{k, item}});
            if constexpr (std::is_same_v<T, double>) {
                out.push_back(one.num(k));
            } else {
                out.push_back(static_cast<T>(one.count(k)));
            }
        }
        if (out.empty()) throw Error(ErrorKind::usage, flag_of(k) + ": empty list");
        return out;
    }

private:
    io::Config c_;
};

// ---- run directory ----------------------------------------------------------

class RunDir {
public:
    explicit RunDir(fs::path dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
        lock_ = dir_ / ".lock";
        std::FILE* f = std::fopen(lock_.c_str(), "wx");
        if (!f) {
            lock_.clear();
            throw Error(ErrorKind::usage, "run directory " + dir_.string() +
                                              " is in use by another command (remove .lock if it is stale)");
        }
        std::fclose(f);
    }
    ~RunDir() {
        std::error_code ec;
        if (!lock_.empty()) fs::remove(lock_, ec);
    }
    RunDir(const RunDir&) = delete;
    RunDir& operator=(const RunDir&) = delete;

    fs::path file(const std::string& name) {
        outputs_.push_back(name);
        return dir_ / name;
    }
    const std::vector<std::string>& outputs() const { return outputs_; }
    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    fs::path lock_;
    std::vector<std::string> outputs_;
};

std::string hash_path(const fs::path& p) {
    if (!fs::is_directory(p)) return io::fnv1a_hex(io::read_text(p));
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) {
        all += fs::relative(f, p).generic_string();
        all.push_back('\0');
        all += io::read_text(f);
    }
    return io::fnv1a_hex(all);
}

// ---- commands ---------------------------------------------------------------

NeighborTable neighbors_for(const io::CodebookFile& cf, std::size_t m) {
    if (cf.neighbors && cf.neighbors->m() == m) return *cf.neighbors;
    return build_neighbor_table(cf.codebook, m, cf.codebook.size() - 1);
}

void run_build_codebook(const Values& v, RunDir& run) {
    const auto corpus = io::read_corpus(v.str("corpus"));
    KMeansParams p;
    p.k = v.count("k");
    p.seed = v.count("seed");
    p.max_iter = v.count("max_iter");
    p.tol = v.num("tol");
    p.metric = parse_metric(v.str("metric"));
    auto result = kmeans(stack_descriptors(corpus), p);
    auto cb = Codebook::from_centroids(result.centroids, p.metric);
    const std::size_t m = v.count("m");
    const std::string depth = v.str("depth");
    const std::size_t d = depth == "full" ? cb.size() - 1 : Values(io::Config{{"depth", depth}}).count("depth");
    auto table = build_neighbor_table(cb, m, d);
    io::write_codebook(run.file("codebook.json"), cb, &table, p.seed);

    std::string csv = "iteration,objective\n";
    for (std::size_t i = 0; i < result.objective.size(); ++i) {
        csv += std::to_string(i + 1) + "," + io::format_double(result.objective[i]) + "\n";
    }
    io::write_text(run.file("kmeans.csv"), csv);
    io::write_json(run.file("summary.json"), {{"K", cb.size()},
                                              {"d", cb.dim()},
                                              {"descriptors", corpus.total_descriptors()},
                                              {"images", corpus.size()},
                                              {"iterations", result.objective.size()},
                                              {"objective", result.objective.empty() ? 0.0 : result.objective.back()}});
}

void run_encode(const Values& v, RunDir& run) {
    const auto corpus = io::read_corpus(v.str("corpus"));
    const auto cf = io::read_codebook(v.str("codebook"));
    EncodeOptions opt;
    opt.scheme = parse_scheme(v.str("scheme"));
    if (opt.scheme == Scheme::soft) {
        if (!v.has("beta")) throw Error(ErrorKind::usage, "soft coding needs --beta");
        opt.softness = v.num("beta");
    }
    const std::string retain = v.str("retain");
    if (retain != "auto" && retain != "yes" && retain != "no") {
        throw Error(ErrorKind::usage, "--retain: expected auto, yes or no");
    }
    opt.retain_coding = retain == "yes" || (retain == "auto" && opt.scheme == Scheme::soft);
    auto enc = encode_corpus(corpus, cf.codebook, opt);
    io::write_representations(run.file("representations.csv"), enc.representations);
    if (enc.coding) io::write_coding(run.file("coding.csv"), *enc.coding);
    io::write_json(run.file("summary.json"), {{"images", corpus.size()},
                                              {"K", cf.codebook.size()},
                                              {"scheme", to_string(opt.scheme)},
                                              {"beta", opt.softness},
                                              {"distance_evaluations", enc.distance_evaluations}});
}

void run_select(const Values& v, RunDir& run) {
    const auto cf = io::read_codebook(v.str("codebook"));
    const auto table = neighbors_for(cf, v.count("m"));
    AnnealConfig cfg;
    cfg.lambda = v.num("lambda");
    cfg.target_size = v.count("target_size");
    cfg.move_size = v.count("move_size");
    cfg.seed = v.count("seed");
    cfg.marginal = parse_marginal_model(v.str("marginal"));
    const std::string chain = v.str("chain");
    if (chain != "initial" && chain != "previous") throw Error(ErrorKind::usage, "--chain: expected initial or previous");
    cfg.chain = chain == "initial" ? ChainMode::initial : ChainMode::previous;

    std::optional<RepresentationMatrix> reps;
    std::optional<CodingMatrix> coding;
    if (v.has("reps") == v.has("coding")) throw Error(ErrorKind::usage, "give exactly one of --reps (hard) or --coding (soft)");
    if (v.has("reps")) {
        reps = io::read_representations(v.str("reps"));
        cfg.scheme = Scheme::hard;
    } else {
        coding = io::read_coding(v.str("coding"));
        cfg.scheme = Scheme::soft;
    }
    cfg.tmax = v.str("tmax") == "auto" ? AnnealConfig::default_tmax(cfg.scheme) : v.count("tmax");

    AnnealInputs in{&table, reps ? &*reps : nullptr, coding ? &*coding : nullptr};
    auto result = anneal(in, cfg);
    io::write_json(run.file("subset.json"), io::subset_json(result.best_subset, cf.codebook.size(), result.best_energy));
    io::write_trace(run.file("trace.csv"), result.trace);
    io::write_json(run.file("score.json"), {{"best_energy", result.best_energy},
                                            {"degenerate_iterations", result.degenerate_iterations},
                                            {"distance_evaluations", result.distance_evaluations},
                                            {"effective_move_size", cfg.effective_move_size()},
                                            {"tmax", cfg.tmax},
                                            {"report", io::score_report_json(result.best_report)}});
}

RepresentationMatrix prune_with(const std::string& method, const RepresentationMatrix& reps, const PruneSet& ps,
                                const NeighborTable& table, std::span<const TransitionWeights> weights) {
    if (method == "psi") return prune_hard(reps, ps, table);
    if (method == "discard") return discard_baseline(reps, ps).representations;
    return prune_hard_exact(reps, ps.pruned(), weights);
}

void run_eval(const Values& v, RunDir& run) {
    auto train = io::read_representations(v.str("train"));
    auto test = io::read_representations(v.str("test"));
    const std::string method = v.has("subset") ? v.str("method") : "none";
    if (method != "none" && method != "psi" && method != "exact-psi" && method != "discard") {
        throw Error(ErrorKind::usage, "--method: expected psi, exact-psi or discard");
    }
    if (v.has("subset")) {
        const auto cf = io::read_codebook(v.str("codebook"));
        const auto keep = io::read_subset(v.str("subset"));
        const auto ps = PruneSet::keep(train.active_words(), keep);
        NeighborTable table;
        std::vector<TransitionWeights> weights;
        if (method == "psi") table = neighbors_for(cf, v.count("m"));
        if (method == "exact-psi") {
            const double sigma = v.num("sigma");
            std::vector<WordIndex> active = train.active_words();
            for (WordIndex l : ps.pruned()) {
                auto c = cf.codebook.centroid(l);
                weights.push_back(estimate_lambda(cf.codebook, l, {{c.begin(), c.end()}, sigma}, v.count("lambda_samples"),
                                                  derive_seed(v.count("seed"), l), active));
                active.erase(std::lower_bound(active.begin(), active.end(), l));
            }
        }
        train = prune_with(method, train, ps, table, weights);
        test = prune_with(method, test, ps, table, weights);
    }
    TrainOptions opt{v.num("c"), v.count("epochs"), v.count("seed")};
    auto model = train_linear(train, opt);
    auto ev = evaluate(model, test);
    json per_class = json::object();
    for (std::size_t c = 0; c < ev.classes.size(); ++c) {
        per_class[ev.classes[c]] = {{"accuracy", ev.per_class_accuracy[c]}, {"count", ev.per_class_count[c]}};
    }
    io::write_json(run.file("eval.json"), {{"method", method},
                                           {"words", train.active_words().size()},
                                           {"macro_accuracy", ev.macro_accuracy},
                                           {"per_class", per_class}});
    io::write_json(run.file("model.json"), io::model_json(model));
}

SyntheticMixture mixture_from(const Values& v) {
    SyntheticMixture m;
    m.means = io::read_codebook(v.str("codebook")).codebook.centroids();
    m.sigma = v.num("sigma");
    return m;
}

void run_validate(const Values& v, RunDir& run) {
    const std::string exp = v.str("experiment");
    json report;
    if (exp == "claim2") {
        SoftExactnessConfig cfg;
        cfg.instances = v.count("instances");
        cfg.seed = v.count("seed");
        auto r = verify_soft_exactness(cfg);
        json rows = json::array();
        for (const auto& in : r.instances) {
            rows.push_back({{"words", in.words},
                            {"pruned", in.pruned},
                            {"dim", in.dim},
                            {"softness", in.softness},
                            {"max_error", in.max_error},
                            {"oracle_distance_evaluations", in.oracle_distance_evaluations},
                            {"pruning_distance_evaluations", in.pruning_distance_evaluations}});
        }
        report = {{"experiment", exp}, {"pass", r.pass}, {"max_error", r.max_error}, {"tolerance", cfg.tolerance},
                  {"instances", rows}};
    } else if (exp == "prop1") {
        TransferCheckConfig cfg;
        cfg.pruned = v.count("pruned");
        cfg.descriptors = v.count("descriptors");
        cfg.trials = v.str("trials") == "auto" ? 200 : v.count("trials");
        cfg.lambda_samples = v.count("lambda_samples");
        cfg.seed = v.count("seed");
        auto r = verify_expected_transfer(mixture_from(v), cfg);
        json bins = json::array();
        for (const auto& b : r.bins) {
            bins.push_back({{"word", b.word - 1},
                            {"lambda", b.lambda},
                            {"mean_full", b.mean_full},
                            {"mean_oracle", b.mean_oracle},
                            {"mean_psi", b.mean_psi},
                            {"gap", b.gap},
                            {"standard_error", b.standard_error},
                            {"pass", b.pass}});
        }
        report = {{"experiment", exp},         {"pass", r.pass},   {"max_gap", r.max_gap},
                  {"max_gap_in_se", r.max_gap_in_se}, {"mean_in_cell", r.mean_in_cell}, {"bins", bins}};
    } else if (exp == "variance") {
        VarianceConfig cfg;
        cfg.pruned = v.count("pruned");
        cfg.descriptors = v.count("descriptors");
        cfg.trials = v.str("trials") == "auto" ? 1000 : v.count("trials");
        cfg.lambda_samples = v.count("lambda_samples");
        cfg.seed = v.count("seed");
        auto r = verify_variance(mixture_from(v), cfg);
        json bins = json::array();
        for (const auto& b : r.bins) {
            bins.push_back({{"word", b.word - 1},
                            {"lambda", b.lambda},
                            {"var_empirical", b.var_empirical},
                            {"var_predicted", b.var_predicted},
                            {"ratio", b.ratio},
                            {"judged", b.judged},
                            {"pass", b.pass}});
        }
        report = {{"experiment", exp}, {"pass", r.pass}, {"in_cell", r.in_cell}, {"trials", cfg.trials}, {"bins", bins}};
    } else if (exp == "heuristic-gap") {
        auto mix = mixture_from(v);
        const auto sigmas = v.list<double>("sigmas");
        const auto ms = v.list<std::size_t>("ms");
        auto rows = heuristic_gap(mix, v.count("pruned"), sigmas, ms, v.count("lambda_samples"), v.count("seed"));
        std::string csv = "sigma,m,max_gap,mean_gap\n";
        json out = json::array();
        for (const auto& r : rows) {
            csv += io::format_double(r.sigma) + "," + std::to_string(r.m) + "," + io::format_double(r.max_gap) + "," +
                   io::format_double(r.mean_gap) + "\n";
            out.push_back({{"sigma", r.sigma}, {"m", r.m}, {"max_gap", r.max_gap}, {"mean_gap", r.mean_gap}});
        }
        io::write_text(run.file("heuristic_gap.csv"), csv);
        report = {{"experiment", exp}, {"rows", out}};
    } else {
        throw Error(ErrorKind::usage, "unknown experiment '" + exp + "' (prop1, variance, claim2, heuristic-gap)");
    }
    io::write_json(run.file("report.json"), report);
}

// ---- driver -----------------------------------------------------------------

io::Config resolve(const Command& cmd, const io::Config& file_values, const io::Config& flags) {
    io::Config c;
    for (const auto& k : cmd.keys) c[k.name] = k.fallback;
    for (const auto& [k, val] : file_values) {
        if (!c.count(k)) throw Error(ErrorKind::usage, "config: unknown key '" + k + "' for " + cmd.name);
        c[k] = val;
    }
    for (const auto& [k, val] : flags) c[k] = val;
    for (const auto& k : cmd.keys) {
        if (k.path && !c[k.name].empty()) c[k.name] = fs::absolute(c[k.name]).lexically_normal().string();
    }
    return c;
}

json execute(const Command& cmd, const io::Config& config, const fs::path& out) {
    RunDir run(out);
    const Values v(config);
    json inputs = json::object();
    for (const auto& k : cmd.keys) {
        if (!k.path || !v.has(k.name)) continue;
        if (!fs::exists(v.str(k.name))) throw Error(ErrorKind::data, flag_of(k.name) + ": no such file: " + v.str(k.name));
        inputs[k.name] = {{"path", v.str(k.name)}, {"fnv1a", hash_path(v.str(k.name))}};
    }

    if (cmd.name == "build-codebook") run_build_codebook(v, run);
    else if (cmd.name == "encode") run_encode(v, run);
    else if (cmd.name == "select") run_select(v, run);
    else if (cmd.name == "eval") run_eval(v, run);
    else run_validate(v, run);

    const std::string text = io::config_text(config);
    io::write_text(run.dir() / "config.txt", text);
    json outputs = json::object();
    for (const auto& name : run.outputs()) outputs[name] = io::fnv1a_hex(io::read_text(run.dir() / name));
    json seeds = json::object();
    if (config.count("seed")) seeds["seed"] = config.at("seed");
    json manifest{{"command", cmd.name},
                  {"config", config},
                  {"config_fnv1a", io::fnv1a_hex(text)},
                  {"seeds", seeds},
                  {"inputs", inputs},
                  {"outputs", outputs},
                  {"versions", {{"wordprune", WORDPRUNE_VERSION}, {"manifest", 1}}}};
    io::write_json(run.dir() / "manifest.json", manifest);
    return manifest;
}

int replay(const fs::path& manifest_path, const fs::path& out) {
    const json m = io::read_json(manifest_path);
    const Command& cmd = command(m.at("command").get<std::string>());
    const io::Config config = m.at("config").get<io::Config>();
    for (const auto& [key, in] : m.at("inputs").items()) {
        const auto path = in.at("path").get<std::string>();
        if (!fs::exists(path) || hash_path(path) != in.at("fnv1a").get<std::string>()) {
            throw Error(ErrorKind::data, "input " + key + " changed since the recorded run: " + path);
        }
    }
    const json again = execute(cmd, config, out);
    std::size_t differ = 0;
    for (const auto& [name, hash] : m.at("outputs").items()) {
        const bool same = again.at("outputs").contains(name) && again.at("outputs").at(name) == hash;
        std::cout << (same ? "identical " : "DIFFERS   ") << name << "\n";
        if (!same) ++differ;
    }
    if (differ) throw Error(ErrorKind::data, std::to_string(differ) + " output(s) differ from the recorded run");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Visual-word pruning without re-coding"};
    app.set_version_flag("--version", WORDPRUNE_VERSION);
    app.require_subcommand(1);

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, std::string> config_file, out_dir;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const auto& cmd : commands()) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        for (const auto& k : cmd.keys) {
            std::string help = k.help + (k.fallback.empty() ? "" : " [" + k.fallback + "]");
            if (k.name == "experiment") {
                sub->add_option("experiment", raw[cmd.name][k.name], help)->required();
            } else {
                sub->add_option(flag_of(k.name), raw[cmd.name][k.name], help);
            }
        }
        sub->add_option("--config", config_file[cmd.name], "key = value file; flags override it");
        sub->add_option("--out", out_dir[cmd.name], "run directory")->required();
        subs.emplace_back(cmd.name, sub);
    }

    std::string manifest, replay_out;
    auto* rp = app.add_subcommand("replay", "re-run a command from its manifest and compare outputs");
    rp->add_option("--manifest", manifest, "manifest.json of a previous run")->required();
    rp->add_option("--out", replay_out, "run directory for the replay")->required();

    std::string config_for;
    auto* cf = app.add_subcommand("config", "print the default config file of a command");
    cf->add_option("command", config_for, "command name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*rp) return replay(manifest, replay_out);
        if (*cf) {
            const Command& cmd = command(config_for);
            for (const auto& k : cmd.keys) {
                std::cout << "# " << k.help << "\n" << (k.fallback.empty() ? "# " : "") << k.name << " = " << k.fallback << "\n";
            }
            return 0;
        }
        for (const auto& [name, sub] : subs) {
            if (!*sub) continue;
            const Command& cmd = command(name);
            io::Config flags;
            for (const auto& k : cmd.keys) {
                if (sub->count(k.name == "experiment" ? "experiment" : flag_of(k.name)) > 0) flags[k.name] = raw[name][k.name];
            }
            const io::Config from_file = config_file[name].empty() ? io::Config{} : io::read_config(config_file[name]);
            (void)execute(cmd, resolve(cmd, from_file, flags), out_dir[name]);
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "wordprune: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "wordprune: " << e.what() << "\n";
        return 2;
    }
}

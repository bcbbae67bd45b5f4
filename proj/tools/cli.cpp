#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

#include "digest.hpp"
#include "wordpost/dynamic.hpp"
#include "wordpost/embedding_store.hpp"
#include "wordpost/evaluation.hpp"
#include "wordpost/postprocess.hpp"
#include "wordpost/synthetic.hpp"

namespace wordpost::cli {

namespace {

constexpr const char* kVersion = "0.3.0";

using Settings = std::vector<std::pair<std::string, std::string>>;

template <typename T>
std::string str(const T& v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

// Run log: '#'-prefixed reproducibility header, then command-specific lines.
class RunLog {
public:
    RunLog(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::invalid_argument("cannot open log file: " + path);
            stream_ = file_.get();
        }
    }

    std::ostream& stream() { return *stream_; }

    void header(const std::string& command, const Settings& settings, const std::vector<std::string>& inputs) {
        auto& os = *stream_;
        os << "# wordpost " << kVersion << ' ' << command << '\n';
        os << "# config";
        for (const auto& [k, v] : settings) os << ' ' << k << '=' << v;
        os << '\n';
        for (const auto& path : inputs) {
            const FileDigest d = digest_file(path);
            os << "# input " << path << " sha256=" << d.sha256 << " bytes=" << d.bytes << '\n';
        }
        os.flush();
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

std::string default_log(const std::string& explicit_log, const std::string& output) {
    if (!explicit_log.empty()) return explicit_log;
    return output.empty() ? std::string() : output + ".log";
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

struct Options {
    std::string input, output, log, corpus, subspace, format = "text", mode = "add", unk = kUnkToken;
    std::vector<std::string> datasets;
    std::size_t d = 0, top = 0, static_dim = 0;
    bool paper_d = false, self_check = false;
    PdeConfig pde;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

int cmd_inspect(const Options& o, bool top_given, std::ostream& out, std::ostream& err) {
    RunLog log(o.log, err);
    const Embeddings emb = load_embeddings_file(o.input);
    const std::size_t limit = std::min(emb.dim(), emb.size());
    require(limit > 0, "embedding file is empty: " + o.input);
    const std::size_t top = top_given ? o.top : std::min<std::size_t>(limit, 10);
    log.header("inspect", {{"input", o.input}, {"top", str(top)}}, {o.input});
    print_report(out, anisotropy_report(emb.vectors, top));
    return kSuccess;
}

int cmd_postprocess(const std::string& name, const Options& o, bool d_given, std::ostream& err) {
    RunLog log(default_log(o.log, o.output), err);
    const Embeddings emb = load_embeddings_file(o.input);
    std::size_t d = o.d;
    std::string source = "flag";
    if (o.paper_d) {
        d = kPresetThreshold;
        source = "preset";
    } else if (!d_given) {
        d = PvnConfig::for_dimension(emb.dim()).d;
        source = "round(D/50)";
    }
    log.header(name, {{"input", o.input}, {"output", o.output}, {"d", str(d)}, {"d_source", source}}, {o.input});
    PvnConfig cfg{d};
    cfg.validate(emb.dim(), emb.size());
    const EmbeddingMatrix result = name == "pvn" ? pvn(emb.vectors, cfg) : ppa(emb.vectors, d);
    save_embeddings_file(o.output, emb.vocab, result);
    log.stream() << "# wrote " << result.rows() << " x " << result.cols() << " to " << o.output << '\n';
    return kSuccess;
}

Settings pde_settings(const Options& o) {
    const PdeConfig& p = o.pde;
    return {{"k", str(p.k)},          {"c", str(p.c)},           {"negatives", str(p.negatives)},
            {"beta", str(p.beta)},    {"lr", str(p.learning_rate)}, {"batch", str(p.batch_size)},
            {"epochs", str(p.epochs)}, {"alpha", str(p.alpha)},   {"seed", str(p.seed)}};
}

void write_epoch(std::ostream& os, const EpochStats& e) {
    os << e.epoch << ',' << e.samples << ',' << std::setprecision(10) << e.mean_objective << '\n';
    os.flush();
}

int cmd_self_check(const Options& o, std::ostream& out, std::ostream& err) {
    RunLog log(o.log, err);
    PlantedSpec spec;
    spec.seed = o.pde.seed + 6;
    const PdeConfig cfg = planted_training_config(o.pde.seed);
    Settings settings{{"self_check", "planted"}, {"vocab", str(spec.vocab_size)}, {"dim", str(spec.dim)},
                      {"lines", str(spec.lines)}};
    for (auto& kv : pde_settings(Options{.pde = cfg})) settings.push_back(kv);
    log.header("pde-train", settings, {});

    const PlantedRecovery r = planted_recovery(spec, cfg);
    for (const auto& e : r.planted.log) write_epoch(log.stream(), e);
    const double worst = r.angles_deg.maxCoeff();
    const double gap = r.planted_objective - r.shuffled_objective;
    const bool ok = worst <= 5.0 && gap >= 0.1;
    out << "principal_angles_deg " << r.angles_deg.transpose() << '\n'
        << "objective_planted " << r.planted_objective << '\n'
        << "objective_shuffled " << r.shuffled_objective << '\n'
        << "self_check " << (ok ? "pass" : "fail") << '\n';
    if (!o.output.empty()) {
        std::ofstream f(o.output);
        require(static_cast<bool>(f), "cannot open output file: " + o.output);
        save_subspace(f, r.planted.subspace);
    }
    return ok ? kSuccess : kNumericalFailure;
}

int cmd_pde_train(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.self_check) return cmd_self_check(o, out, err);
    require(!o.input.empty() && !o.corpus.empty() && !o.output.empty(),
            "pde-train needs --input, --corpus and --output (or --self-check)");
    RunLog log(default_log(o.log, o.output), err);
    Settings settings{{"input", o.input}, {"corpus", o.corpus}, {"output", o.output}, {"unk", o.unk}};
    for (auto& kv : pde_settings(o)) settings.push_back(kv);
    log.header("pde-train", settings, {o.input, o.corpus});

    Embeddings emb = load_embeddings_file(o.input);
    o.pde.validate(emb.dim());
    const Index unk = ensure_unk_row(emb, o.unk);
    std::ifstream text(o.corpus);
    require(static_cast<bool>(text), "cannot open corpus: " + o.corpus);
    const Corpus corpus = ingest_corpus(text, emb.vocab, o.pde.c, unk);
    log.stream() << "# corpus tokens=" << corpus.tokens << " oov=" << corpus.oov_tokens
                 << " samples=" << corpus.samples.size() << '\n'
                 << "epoch,samples,mean_objective\n";

    const TrainResult result =
        train_pde(corpus.samples, corpus.counts, emb.vectors, o.pde, [&](const EpochStats& e) { write_epoch(log.stream(), e); });
    std::ofstream f(o.output);
    require(static_cast<bool>(f), "cannot open output file: " + o.output);
    save_subspace(f, result.subspace);
    return kSuccess;
}

int cmd_compose(const Options& o, bool static_given, std::ostream& err) {
    RunLog log(default_log(o.log, o.output), err);
    const Embeddings emb = load_embeddings_file(o.input);
    std::ifstream sf(o.subspace);
    require(static_cast<bool>(sf), "cannot open subspace file: " + o.subspace);
    const DynamicSubspace s = load_subspace(sf);
    require(s.dim() == emb.dim(), "subspace dimension " + str(s.dim()) + " does not match embedding dimension " +
                                      str(emb.dim()));
    const std::size_t static_dim = static_given ? o.static_dim : emb.dim() - std::min(emb.dim(), s.k());
    log.header("compose",
               {{"input", o.input}, {"subspace", o.subspace}, {"output", o.output}, {"static_dim", str(static_dim)},
                {"k", str(s.k())}},
               {o.input, o.subspace});
    const EmbeddingMatrix composed = compose_embedding(emb.vectors, s, static_dim);
    save_embeddings_file(o.output, emb.vocab, composed);
    log.stream() << "# wrote " << composed.rows() << " x " << composed.cols() << " to " << o.output << '\n';
    return kSuccess;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
    RunLog log(o.log, err);
    log.header("eval", {{"input", o.input}, {"mode", o.mode}, {"format", o.format}},
               [&] {
                   std::vector<std::string> all{o.input};
                   all.insert(all.end(), o.datasets.begin(), o.datasets.end());
                   return all;
               }());
    const Embeddings emb = load_embeddings_file(o.input);
    const AnalogyMode mode = o.mode == "mul" ? AnalogyMode::mul : AnalogyMode::add;

    EvalReport report;
    for (const auto& path : o.datasets) {
        std::ifstream probe(path);
        require(static_cast<bool>(probe), "cannot open dataset: " + path);
        const DatasetKind kind = detect_dataset_kind(probe);
        std::ifstream in(path);
        if (kind == DatasetKind::similarity)
            report.similarity.push_back(eval_similarity(emb.vocab, emb.vectors, load_similarity(in, stem(path))));
        else
            report.analogy.push_back(eval_analogy(emb.vocab, emb.vectors, load_analogy(in, stem(path)), mode));
    }
    if (o.format == "csv")
        write_csv(out, report);
    else
        write_text(out, report);
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Post-processing and intrinsic evaluation of word embeddings", "wordpost"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
    app.allow_config_extras(false);
    app.set_version_flag("--version", kVersion);

    Options o;
    const PdeConfig defaults;
    o.pde = defaults;

    auto* inspect = app.add_subcommand("inspect", "Print the anisotropy report of an embedding");
    inspect->add_option("--input", o.input, "Embedding text file")->required();
    auto* top_opt = inspect->add_option("--top", o.top, "Number of leading components to report (default min(D,|V|,10))")
                        ->check(CLI::PositiveNumber);
    inspect->add_option("--log", o.log, "Run log path (default stderr)");

    struct PostOpts {
        CLI::App* app;
        CLI::Option* d;
    };
    auto add_post = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--input", o.input, "Embedding text file")->required();
        sub->add_option("--output", o.output, "Processed embedding output")->required();
        auto* d = sub->add_option("--d", o.d, "Component threshold (default round(D/50))");
        sub->add_flag("--paper-d", o.paper_d, "Use d=11")->excludes(d);
        sub->add_option("--log", o.log, "Run log path (default <output>.log)");
        return PostOpts{sub, d};
    };
    const PostOpts pvn_cmd = add_post("pvn", "Normalize the variance of the leading principal components");
    const PostOpts ppa_cmd = add_post("ppa", "Remove the mean and the leading principal components");

    auto* pde = app.add_subcommand("pde-train", "Learn a dynamic subspace from an ordered corpus");
    pde->add_option("--input", o.input, "Embedding text file");
    pde->add_option("--corpus", o.corpus, "Corpus: one sentence per line, whitespace tokens");
    pde->add_option("--output", o.output, "Subspace output file");
    pde->add_option("--k", o.pde.k, "Dynamic dimension")->capture_default_str();
    pde->add_option("--c", o.pde.c, "Context half-window")->capture_default_str();
    pde->add_option("--negatives", o.pde.negatives, "Negative samples per positive")->capture_default_str();
    pde->add_option("--beta", o.pde.beta, "Orthogonalization rate in (0,1]")->capture_default_str();
    pde->add_option("--lr", o.pde.learning_rate, "Initial learning rate")->capture_default_str();
    pde->add_option("--batch", o.pde.batch_size, "Samples per batch")->capture_default_str();
    pde->add_option("--epochs", o.pde.epochs, "Passes over the corpus")->capture_default_str();
    pde->add_option("--alpha", o.pde.alpha, "Negative sampling exponent on counts")->capture_default_str();
    pde->add_option("--seed", o.pde.seed, "Random seed")->capture_default_str();
    pde->add_option("--unk", o.unk, "Token shared by out-of-vocabulary words")->capture_default_str();
    pde->add_flag("--self-check", o.self_check, "Train on a planted toy corpus and verify recovery");
    pde->add_option("--log", o.log, "Run/training log path (default <output>.log)");

    auto* compose = app.add_subcommand("compose", "Concatenate static PCA coordinates with the dynamic projection");
    compose->add_option("--input", o.input, "Embedding text file")->required();
    compose->add_option("--subspace", o.subspace, "Subspace file from pde-train")->required();
    compose->add_option("--output", o.output, "Composed embedding output")->required();
    auto* static_opt = compose->add_option("--static-dim", o.static_dim, "Static PCA dimensions (default D-k)");
    compose->add_option("--log", o.log, "Run log path (default <output>.log)");

    auto* eval = app.add_subcommand("eval", "Word similarity and analogy evaluation");
    eval->add_option("--input", o.input, "Embedding text file")->required();
    eval->add_option("--datasets", o.datasets, "Similarity or analogy dataset files")->required()->expected(1, -1);
    eval->add_option("--mode", o.mode, "Analogy scoring")->check(CLI::IsMember({"add", "mul"}))->capture_default_str();
    eval->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    eval->add_option("--log", o.log, "Run log path (default stderr)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (inspect->parsed()) return cmd_inspect(o, top_opt->count() > 0, out, err);
        if (pvn_cmd.app->parsed()) return cmd_postprocess("pvn", o, pvn_cmd.d->count() > 0, err);
        if (ppa_cmd.app->parsed()) return cmd_postprocess("ppa", o, ppa_cmd.d->count() > 0, err);
        if (pde->parsed()) return cmd_pde_train(o, out, err);
        if (compose->parsed()) return cmd_compose(o, static_opt->count() > 0, err);
        if (eval->parsed()) return cmd_eval(o, out, err);
    } catch (const NumericalError& e) {
        err << "wordpost: numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const ParseError& e) {
        err << "wordpost: parse error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "wordpost: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::out_of_range& e) {
        err << "wordpost: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "wordpost: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kUsageError;
}

}  // namespace wordpost::cli

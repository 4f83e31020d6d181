#include "cli.hpp"

#include "demosel/analysis.hpp"
#include "demosel/baselines.hpp"
#include "demosel/corpus.hpp"
#include "demosel/encoder.hpp"
#include "demosel/error.hpp"
#include "demosel/evaluation.hpp"
#include "demosel/http_generator.hpp"
#include "demosel/sim_generator.hpp"
#include "demosel/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#ifndef DEMOSEL_VERSION
#define DEMOSEL_VERSION "unknown"
#endif

namespace demosel {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Reads flat JSON objects as CLI11 config for the subcommand being run. A run
// manifest works too: its "config" member is used and the rest is ignored.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App& app) : app_(app) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw InputError(std::string("config file is not valid JSON: ") + e.what());
        }
        const json& cfg = doc.is_object() && doc.contains("config") ? doc["config"] : doc;
        if (!cfg.is_object()) throw InputError("config file must hold a JSON object");
        const auto subs = app_.get_subcommands();
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : cfg.items()) {
            CLI::ConfigItem item;
            if (!subs.empty()) item.parents = {subs.front()->get_name()};
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(key, v));
            } else {
                item.inputs.push_back(scalar(key, value));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    static std::string scalar(const std::string& key, const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number() || v.is_boolean()) return v.dump();
        throw InputError("config key '" + key + "' must be a string, number, boolean or array of those");
    }

    const CLI::App& app_;
};

struct Options {
    std::vector<std::string> corpus;
    std::string vectors;
    std::size_t hash_dim = 256;
    std::uint64_t hash_seed = 0;
    std::string annotations;
    std::string token_map;

    std::string backend = "sim";
    std::string generator_url;
    int max_new_tokens = 64;
    double temperature = 0.0;
    std::string order = "sampling";
    std::string language = "english";
    std::string template_path;
    std::string tokenize = "word";

    TrainConfig train;
    std::string reward_metric = "rougeL";

    std::vector<std::string> selectors;
    std::string checkpoint;
    std::string split = "dev";

    std::string axis;
    std::vector<std::size_t> values;

    std::size_t n_candidates = 200;
    std::size_t n_train = 200;
    std::size_t n_dev = 100;

    std::string out_dir;
    std::size_t jobs = 4;
};

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount())) != 1) {
            throw Error("sha256 update failed");
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw Error("sha256 final failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

json file_record(const std::string& path) { return json{{"path", path}, {"sha256", sha256_file(path)}}; }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

fs::path output_dir(const Options& o) {
    fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

// Everything loaded from disk (or synthesized) that a command works on.
// Not movable: the index, context and selectors keep references into it.
class Workspace {
public:
    Workspace(const Options& o, std::ostream& err, bool with_generator) : jobs_(o.jobs) {
        if (o.jobs < 1) throw InputError("--jobs must be at least 1");
        mode = parse_tokenize_mode(o.tokenize);

        for (const auto& entry : o.corpus) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
                throw InputError("--corpus expects role=path, got '" + entry + "'");
            }
            const auto role = parse_split_role(entry.substr(0, eq));
            const auto path = entry.substr(eq + 1);
            if (inputs.contains(std::string(to_string(role)))) {
                throw InputError("--corpus given twice for role " + std::string(to_string(role)));
            }
            split.role(role) = load_corpus(path, role);
            inputs[std::string(to_string(role))] = file_record(path);
        }
        validate_split(split);

        if (!o.annotations.empty()) {
            const auto unknown = merge_annotations(o.annotations, split);
            if (unknown > 0) err << "warning: " << unknown << " annotation records name unknown ids\n";
            inputs["annotations"] = file_record(o.annotations);
        }
        if (!o.token_map.empty()) {
            token_map = load_token_map(o.token_map);
            inputs["token_map"] = file_record(o.token_map);
        }

        index = std::make_unique<CaseIndex>(split);

        if (!o.vectors.empty()) {
            std::vector<std::string> ids;
            for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev, SplitRole::test}) {
                for (const auto& c : split.role(role)) ids.push_back(c.id);
            }
            auto loaded = load_vectors(o.vectors, ids);
            if (loaded.duplicate_lines > 0) {
                err << "warning: " << loaded.duplicate_lines << " duplicate vector ids, last occurrence kept\n";
            }
            table = std::move(loaded.table);
            inputs["vectors"] = file_record(o.vectors);
        } else {
            if (o.hash_dim < 16) throw InputError("--hash-dim must be at least 16");
            table = hash_table(split, o.hash_dim, o.hash_seed);
        }

        if (!o.template_path.empty()) {
            tmpl = load_template(o.template_path);
            inputs["template"] = file_record(o.template_path);
        } else {
            tmpl.instruction = default_instruction(parse_language(o.language));
        }
        tmpl.order = parse_example_order(o.order);

        request.max_new_tokens = o.max_new_tokens;
        request.temperature = o.temperature;
        if (o.max_new_tokens < 1) throw InputError("--max-new-tokens must be at least 1");
        if (!(o.temperature >= 0.0)) throw InputError("--temperature must be non-negative");

        if (with_generator) generator = make_generator(o, split);
    }

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    std::unique_ptr<Generator> make_generator(const Options& o, const CorpusSplit& s) const {
        if (o.backend == "sim") {
            return std::make_unique<SimulatedGenerator>(s, tmpl, derive_seed(o.train.seed, {"sim-noise"}), mode);
        }
        if (o.backend == "http") {
            if (o.generator_url.empty()) throw InputError("--backend http needs --generator-url");
            HttpGeneratorOptions h;
            h.url = o.generator_url;
            h.api_key = api_key_from_env();
            h.max_in_flight = o.jobs;
            return std::make_unique<HttpGenerator>(std::move(h));
        }
        throw InputError("unknown backend '" + o.backend + "' (expected sim or http)");
    }

    EpisodeContext context() const { return EpisodeContext{split, *index, *generator, tmpl, request, mode, jobs_}; }

    void require(SplitRole role) const {
        if (split.role(role).empty()) {
            throw InputError("no " + std::string(to_string(role)) + " cases; pass --corpus " +
                             std::string(to_string(role)) + "=<path>");
        }
    }

    CorpusSplit split;
    std::unique_ptr<CaseIndex> index;
    EmbeddingTable table;
    TokenMap token_map;
    PromptTemplate tmpl;
    GenRequest request;
    TokenizeMode mode = TokenizeMode::word;
    std::unique_ptr<Generator> generator;
    json inputs = json::object();

private:
    std::size_t jobs_;
};

TrainConfig resolved_train_config(const Options& o) {
    TrainConfig cfg = o.train;
    cfg.reward_metric = parse_reward_metric(o.reward_metric);
    validate(cfg);
    return cfg;
}

std::unique_ptr<Selector> make_selector(const std::string& spec, const Workspace& ws, const Options& o) {
    const auto candidates = ids_of(ws.split.candidates);
    if (spec == "random") return std::make_unique<RandomSelector>(candidates, o.train.seed);
    if (spec == "bm25") return std::make_unique<Bm25Selector>(Bm25Index(ws.split.candidates, {}, ws.mode, ws.token_map));
    if (spec == "knn") return std::make_unique<KnnSelector>(ws.table, candidates);
    if (spec == "policy") {
        if (o.checkpoint.empty()) throw InputError("selector policy needs --checkpoint");
        auto ckpt = load_checkpoint(o.checkpoint);
        if (ckpt.params.dim() != ws.table.dim()) {
            throw InputError("checkpoint dimension " + std::to_string(ckpt.params.dim()) +
                             " does not match embedding dimension " + std::to_string(ws.table.dim()));
        }
        return std::make_unique<PolicySelector>(std::move(ckpt.params), ws.table, candidates);
    }
    if (spec == "length" || spec == "pos" || spec == "chunk") {
        return std::make_unique<ComplexitySelector>(ws.split.candidates, parse_complexity_metric(spec), ws.mode);
    }
    if (spec.starts_with("file:")) {
        const fs::path path = spec.substr(5);
        if (path.empty()) throw InputError("selector file: needs a path");
        return std::make_unique<FileSelector>(load_selections(path), path.stem().string());
    }
    throw InputError("unknown selector '" + spec + "'");
}

// The subset of options that determines a run's results, keyed like the flags
// so the manifest can be passed back through --config.
json config_json(const Options& o, bool generation, bool training, bool selection) {
    json c;
    c["corpus"] = o.corpus;
    if (!o.vectors.empty()) {
        c["vectors"] = o.vectors;
    } else {
        c["hash-dim"] = o.hash_dim;
        c["hash-seed"] = o.hash_seed;
    }
    if (!o.annotations.empty()) c["annotations"] = o.annotations;
    if (!o.token_map.empty()) c["token-map"] = o.token_map;
    c["tokenize"] = o.tokenize;
    if (generation) {
        c["backend"] = o.backend;
        if (o.backend == "http") c["generator-url"] = o.generator_url;
        c["max-new-tokens"] = o.max_new_tokens;
        c["temperature"] = o.temperature;
        c["order"] = o.order;
        if (o.template_path.empty()) {
            c["language"] = o.language;
        } else {
            c["template"] = o.template_path;
        }
    }
    c["shots"] = o.train.shots;
    c["seed"] = o.train.seed;
    if (training) {
        c["reward-metric"] = o.reward_metric;
        c["epochs"] = o.train.epochs;
        c["batch-size"] = o.train.batch_size;
        c["lr"] = o.train.learning_rate;
        c["baseline-samples"] = o.train.baseline_samples;
        c["patience"] = o.train.early_stop_patience;
    }
    if (selection) {
        c["selector"] = o.selectors;
        if (!o.checkpoint.empty()) c["checkpoint"] = o.checkpoint;
        c["split"] = o.split;
    }
    return c;
}

std::string fmt4(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

int cmd_synth(const Options& o, std::ostream& out) {
    const auto split = synth_corpus(o.train.seed, o.n_candidates, o.n_train, o.n_dev);
    const auto dir = output_dir(o);
    for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev}) {
        const auto path = dir / (std::string(to_string(role)) + ".jsonl");
        save_corpus(path, split.role(role));
        out << to_string(role) << ": " << split.role(role).size() << " cases -> " << path.string() << '\n';
    }
    return 0;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = resolved_train_config(o);
    if (o.out_dir.empty()) throw InputError("train needs --out-dir");
    Workspace ws(o, err, true);
    ws.require(SplitRole::candidates);
    ws.require(SplitRole::train);
    ws.require(SplitRole::dev);
    const auto ctx = ws.context();
    Trainer trainer(ctx, ws.table, cfg);
    const auto fit = trainer.fit();

    const auto dir = output_dir(o);
    std::ostringstream ckpt, history;
    write_checkpoint(ckpt, fit.best);
    write_history(history, fit.history);
    write_text(dir / "checkpoint.json", ckpt.str());
    write_text(dir / "history.jsonl", history.str());

    json manifest;
    manifest["command"] = "train";
    manifest["version"] = DEMOSEL_VERSION;
    manifest["config"] = config_json(o, true, true, false);
    manifest["inputs"] = ws.inputs;
    manifest["result"] = {{"epochs_run", fit.history.size()},
                          {"best_epoch", fit.best_epoch},
                          {"best_dev", fit.best_dev},
                          {"checkpoint_sha256", sha256_file(dir / "checkpoint.json")}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    for (const auto& h : fit.history) {
        out << "epoch " << h.epoch << "  train " << to_string(cfg.reward_metric) << " " << fmt4(h.mean_reward)
            << "  advantage " << fmt4(h.mean_advantage) << "  dev " << fmt4(h.dev_metric.value_or(0.0))
            << "  grad " << fmt4(h.grad_norm);
        if (h.skipped > 0) out << "  skipped " << h.skipped;
        out << '\n';
    }
    out << "best dev " << to_string(cfg.reward_metric) << " " << fmt4(fit.best_dev) << " at epoch " << fit.best_epoch
        << '\n';
    return 0;
}

// Shared by evaluate and compare so both print identical rows.
int run_evaluation(const Options& o, std::ostream& out, std::ostream& err, std::string_view command) {
    if (o.train.shots < 1) throw InputError("--shots must be at least 1");
    Workspace ws(o, err, true);
    const auto role = parse_split_role(o.split);
    ws.require(SplitRole::candidates);
    ws.require(role);
    const auto ctx = ws.context();

    std::vector<EvaluationResult> rows;
    for (const auto& spec : o.selectors) {
        const auto selector = make_selector(spec, ws, o);
        rows.push_back(evaluate_selector(ctx, *selector, ws.split.role(role), o.train.shots));
    }
    write_metric_table(out, rows);

    if (!o.out_dir.empty()) {
        const auto dir = output_dir(o);
        std::ostringstream metrics;
        write_metric_json(metrics, rows);
        write_text(dir / "metrics.jsonl", metrics.str());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            SelectionMap sel;
            for (const auto& ep : rows[i].episodes) sel[ep.test_id] = ep.demo_ids;
            const auto name = rows.size() == 1 ? std::string("selections.jsonl")
                                               : "selections-" + std::to_string(i + 1) + ".jsonl";
            save_selections(dir / name, sel);
        }
        json manifest;
        manifest["command"] = std::string(command);
        manifest["version"] = DEMOSEL_VERSION;
        manifest["config"] = config_json(o, true, false, true);
        auto inputs = ws.inputs;
        if (!o.checkpoint.empty()) inputs["checkpoint"] = file_record(o.checkpoint);
        for (const auto& spec : o.selectors) {
            if (spec.starts_with("file:")) inputs[spec] = file_record(spec.substr(5));
        }
        manifest["inputs"] = inputs;
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return 0;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = resolved_train_config(o);
    if (o.values.empty()) throw InputError("sweep needs --values");
    Workspace ws(o, err, false);
    ws.require(SplitRole::candidates);
    ws.require(SplitRole::train);
    ws.require(SplitRole::dev);
    const auto axis = parse_sweep_axis(o.axis);

    SweepInputs inputs{ws.split, ws.table, [&](const CorpusSplit& s) { return ws.make_generator(o, s); },
                       ws.tmpl,  ws.request, ws.mode, o.jobs, SplitRole::dev};
    const auto rows = sweep(inputs, axis, o.values, cfg);

    std::vector<EvaluationResult> results;
    for (const auto& r : rows) results.push_back(r.result);
    write_metric_table(out, results);
    if (!o.out_dir.empty()) {
        const auto dir = output_dir(o);
        std::ostringstream s;
        for (const auto& r : rows) {
            json j;
            j["axis"] = std::string(to_string(axis));
            j["value"] = r.value;
            j["label"] = r.result.label;
            j["rougeL"] = r.result.mean.rougeL;
            j["best_epoch"] = r.fit.best_epoch;
            j["best_dev"] = r.fit.best_dev;
            s << j.dump() << '\n';
        }
        write_text(dir / "sweep.jsonl", s.str());
    }
    return 0;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.train.shots < 1) throw InputError("--shots must be at least 1");
    Workspace ws(o, err, false);
    const auto role = parse_split_role(o.split);
    ws.require(SplitRole::candidates);
    ws.require(role);

    std::vector<std::pair<std::string, ComplexityStats>> rows;
    for (const auto& spec : o.selectors) {
        const auto selector = make_selector(spec, ws, o);
        SelectionMap sel;
        for (const auto& c : ws.split.role(role)) sel[c.id] = selector->select(c, o.train.shots);
        rows.emplace_back(selector->label(), complexity_of_selection(*ws.index, sel, ws.mode));
    }
    write_complexity_table(out, rows);
    if (!o.out_dir.empty()) {
        std::ostringstream s;
        write_complexity_json(s, rows);
        write_text(output_dir(o) / "complexity.jsonl", s.str());
    }
    return 0;
}

void add_input_options(CLI::App& app, Options& o) {
    app.add_option("--corpus", o.corpus, "Corpus file per split as role=path (candidates, train, dev, test)")
        ->type_name("ROLE=PATH");
    auto* vectors = app.add_option("--vectors", o.vectors, "Precomputed embedding file");
    auto* dim = app.add_option("--hash-dim", o.hash_dim, "Hashed n-gram feature dimension")->capture_default_str();
    auto* hseed = app.add_option("--hash-seed", o.hash_seed, "Hashed feature seed")->capture_default_str();
    vectors->excludes(dim)->excludes(hseed);
    app.add_option("--annotations", o.annotations, "POS/chunk annotation sidecar");
    app.add_option("--token-map", o.token_map, "BM25 token replacement table (token<TAB>stem)");
    app.add_option("--tokenize", o.tokenize, "Metric and BM25 tokenization: word or char")->capture_default_str();
}

void add_generation_options(CLI::App& app, Options& o) {
    app.add_option("--backend", o.backend, "Generator backend: sim or http")->capture_default_str();
    app.add_option("--generator-url", o.generator_url, "Endpoint for --backend http");
    app.add_option("--max-new-tokens", o.max_new_tokens, "Generation length limit")->capture_default_str();
    app.add_option("--temperature", o.temperature, "Generation temperature")->capture_default_str();
    app.add_option("--order", o.order, "Demonstration order: sampling or reverse")->capture_default_str();
    auto* language = app.add_option("--language", o.language, "Instruction language: english or chinese")
                         ->capture_default_str();
    app.add_option("--template", o.template_path, "Prompt template JSON file")->excludes(language);
    app.add_option("--jobs", o.jobs, "Concurrent episodes and generator requests")->capture_default_str();
}

void add_training_options(CLI::App& app, Options& o) {
    app.add_option("--reward-metric", o.reward_metric, "rougeL, rouge1, bleu4 or f1")->capture_default_str();
    app.add_option("--epochs", o.train.epochs)->capture_default_str();
    app.add_option("--batch-size", o.train.batch_size)->capture_default_str();
    app.add_option("--lr", o.train.learning_rate, "Learning rate for W")->capture_default_str();
    app.add_option("--baseline-samples", o.train.baseline_samples, "Random rollouts per baseline")
        ->capture_default_str();
    app.add_option("--patience", o.train.early_stop_patience, "Epochs without dev improvement before stopping")
        ->capture_default_str();
}

void add_common(CLI::App& app, Options& o) {
    app.add_option("--shots", o.train.shots, "Demonstration size k")->capture_default_str();
    app.add_option("--seed", o.train.seed, "Run seed")->capture_default_str();
}

void print_error(std::ostream& err, std::string_view kind, std::string_view message) {
    json j;
    j["error"] = std::string(kind);
    j["message"] = std::string(message);
    err << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app("Demonstration selection for in-context utterance rewriting", "demosel");
    app.require_subcommand(1);
    app.set_version_flag("--version", DEMOSEL_VERSION);
    app.set_config("--config", "", "JSON config file or run manifest; flags given on the command line win");
    app.config_formatter(std::make_shared<JsonConfig>(app));
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();

    auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
    synth->add_option("--seed", o.train.seed)->capture_default_str();
    synth->add_option("--candidates", o.n_candidates)->capture_default_str();
    synth->add_option("--train", o.n_train)->capture_default_str();
    synth->add_option("--dev", o.n_dev)->capture_default_str();
    synth->add_option("--out-dir", o.out_dir)->required();

    auto* train = app.add_subcommand("train", "Train the selection policy");
    add_input_options(*train, o);
    add_generation_options(*train, o);
    add_training_options(*train, o);
    add_common(*train, o);
    train->add_option("--out-dir", o.out_dir, "Checkpoint, history and manifest directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Score one selector");
    auto* compare = app.add_subcommand("compare", "Score several selectors on the same cases");
    for (auto* sub : {evaluate, compare}) {
        add_input_options(*sub, o);
        add_generation_options(*sub, o);
        add_common(*sub, o);
        sub->add_option("--checkpoint", o.checkpoint, "Trained policy for --selector policy");
        sub->add_option("--split", o.split, "Evaluation split")->capture_default_str();
        sub->add_option("--out-dir", o.out_dir, "Write metrics, selections and manifest here");
    }
    evaluate->add_option("--selector", o.selectors, "random|bm25|knn|policy|length|pos|chunk|file:<path>")
        ->required()
        ->expected(1);
    compare->add_option("--selector", o.selectors, "Two or more selectors")->required()->expected(2, 64);

    auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate across shots or data sizes");
    add_input_options(*sweep_cmd, o);
    add_generation_options(*sweep_cmd, o);
    add_training_options(*sweep_cmd, o);
    add_common(*sweep_cmd, o);
    sweep_cmd->add_option("--axis", o.axis, "shots, candidates or train_size")->required();
    sweep_cmd->add_option("--values", o.values, "Comma-separated values")->required()->delimiter(',');
    sweep_cmd->add_option("--out-dir", o.out_dir);

    auto* analyze = app.add_subcommand("analyze", "Complexity of the selected demonstrations");
    add_input_options(*analyze, o);
    add_common(*analyze, o);
    analyze->add_option("--selector", o.selectors)->required()->expected(1, 64);
    analyze->add_option("--checkpoint", o.checkpoint);
    analyze->add_option("--split", o.split)->capture_default_str();
    analyze->add_option("--out-dir", o.out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.what());
        return 2;
    } catch (const InputError& e) {
        print_error(err, "input", e.what());
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(o, out);
        if (train->parsed()) return cmd_train(o, out, err);
        if (evaluate->parsed()) return run_evaluation(o, out, err, "evaluate");
        if (compare->parsed()) return run_evaluation(o, out, err, "compare");
        if (sweep_cmd->parsed()) return cmd_sweep(o, out, err);
        if (analyze->parsed()) return cmd_analyze(o, out, err);
    } catch (const InputError& e) {
        print_error(err, "input", e.what());
        return 2;
    } catch (const GenerationError& e) {
        print_error(err, "generation", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(err, "runtime", e.what());
        return 1;
    }
    return 0;
}

}  // namespace demosel

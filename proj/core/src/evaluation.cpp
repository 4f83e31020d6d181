#include "demosel/evaluation.hpp"

#include "demosel/parallel.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <sstream>

namespace demosel {

EpisodeResult run_episode(const EpisodeContext& ctx, const DialogueCase& test, std::span<const std::string> demo_ids) {
    if (!test.rewrite) throw Error("case '" + test.id + "' has no gold rewrite to score against");
    std::vector<const DialogueCase*> examples;
    examples.reserve(demo_ids.size());
    for (const auto& id : demo_ids) examples.push_back(&ctx.index.at(id));

    EpisodeResult r;
    r.test_id = test.id;
    r.demo_ids.assign(demo_ids.begin(), demo_ids.end());
    r.prompt = render(ctx.tmpl, examples, test);
    GenRequest req = ctx.request;
    req.prompt = r.prompt;
    r.generated = generate(ctx.generator, req, ctx.tmpl.rewrite_label).text;
    r.metrics = score_pair(r.generated, *test.rewrite, test.incomplete, ctx.mode);
    return r;
}

EvaluationResult evaluate_selector(const EpisodeContext& ctx, const Selector& selector,
                                   std::span<const DialogueCase> cases, std::size_t k) {
    if (cases.empty()) throw InputError("evaluation split is empty");
    EvaluationResult result;
    result.label = selector.label();
    result.episodes.resize(cases.size());
    parallel_for(cases.size(), ctx.jobs, [&](std::size_t i) {
        const auto demos = selector.select(cases[i], k);
        result.episodes[i] = run_episode(ctx, cases[i], demos);
    });
    // Summed in case order so the mean is independent of scheduling.
    for (const auto& ep : result.episodes) result.mean += ep.metrics;
    result.mean = result.mean.scaled(1.0 / static_cast<double>(cases.size()));
    return result;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
    return buf;
}

}  // namespace

void write_metric_table(std::ostream& out, std::span<const EvaluationResult> rows) {
    std::size_t label_width = 5;
    for (const auto& r : rows) label_width = std::max(label_width, r.label.size());
    auto cell = [](const std::string& s) {
        std::string c(s.size() < 7 ? 7 - s.size() : 0, ' ');
        return c + s;
    };
    auto pad = [&](const std::string& s) { return s + std::string(label_width - s.size(), ' '); };

    out << pad("Model") << " |" << cell("RL") << cell("R1") << cell("R2") << " |" << cell("B1") << cell("B2")
        << cell("B3") << cell("B4") << " |" << cell("F1") << cell("F2") << cell("F3") << '\n';
    out << std::string(label_width, '-') << "-+" << std::string(21, '-') << "-+" << std::string(28, '-') << "-+"
        << std::string(21, '-') << '\n';
    for (const auto& r : rows) {
        const auto& m = r.mean;
        out << pad(r.label) << " |" << cell(pct(m.rougeL)) << cell(pct(m.rouge1)) << cell(pct(m.rouge2)) << " |";
        for (double b : m.bleu) out << cell(pct(b));
        out << " |";
        for (double f : m.fscore) out << cell(pct(f));
        out << '\n';
    }
}

std::string metric_table(std::span<const EvaluationResult> rows) {
    std::ostringstream out;
    write_metric_table(out, rows);
    return out.str();
}

void write_metric_json(std::ostream& out, std::span<const EvaluationResult> rows) {
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["label"] = r.label;
        j["n"] = r.episodes.size();
        j["rougeL"] = r.mean.rougeL;
        j["rouge1"] = r.mean.rouge1;
        j["rouge2"] = r.mean.rouge2;
        for (int i = 0; i < 4; ++i) j["bleu" + std::to_string(i + 1)] = r.mean.bleu[i];
        for (int i = 0; i < 3; ++i) j["f" + std::to_string(i + 1)] = r.mean.fscore[i];
        out << j.dump() << '\n';
    }
}

}  // namespace demosel

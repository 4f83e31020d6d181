#include "demosel/analysis.hpp"

#include "demosel/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

namespace demosel {
namespace {

struct Mean {
    double sum = 0.0;
    std::size_t n = 0;
    bool complete = true;

    void add(const DialogueCase& c, const char* key) {
        auto it = c.annotations.find(key);
        if (it == c.annotations.end()) {
            complete = false;
            return;
        }
        sum += static_cast<double>(it->second);
        ++n;
    }

    std::optional<double> value() const {
        if (!complete || n == 0) return std::nullopt;
        return sum / static_cast<double>(n);
    }
};

std::string fmt2(std::optional<double> v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

}  // namespace

std::size_t merge_annotations(const std::filesystem::path& path, CorpusSplit& split) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open annotations file " + path.string());
    std::unordered_map<std::string, DialogueCase*> by_id;
    for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev, SplitRole::test}) {
        for (auto& c : split.role(role)) by_id[c.id] = &c;
    }
    std::size_t unknown = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = path.string() + ":" + std::to_string(lineno) + ": ";
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + "malformed record: " + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
            throw InputError(where + "record needs a string 'id'");
        }
        for (const char* key : {kPosTypeCount, kChunkCount}) {
            if (!rec.contains(key)) throw InputError(where + "missing field '" + key + "'");
        }
        auto it = by_id.find(rec["id"].get<std::string>());
        if (it == by_id.end()) {
            ++unknown;
            continue;
        }
        for (const char* key : {kPosTypeCount, kChunkCount, kRewritePosTypeCount, kRewriteChunkCount}) {
            if (!rec.contains(key)) continue;
            const auto& v = rec[key];
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                throw InputError(where + "field '" + key + "' must be a non-negative integer");
            }
            it->second->annotations[key] = v.get<std::int64_t>();
        }
    }
    return unknown;
}

ComplexityStats complexity_of_selection(const CaseIndex& index, const SelectionMap& selections, TokenizeMode mode) {
    ComplexityStats s;
    double inc_len = 0.0;
    double rew_len = 0.0;
    Mean pos, chunk, rpos, rchunk;
    for (const auto& [test_id, ids] : selections) {
        for (const auto& id : ids) {
            const auto& c = index.at(id);
            inc_len += static_cast<double>(tokenize(c.incomplete, mode).size());
            rew_len += static_cast<double>(c.rewrite ? tokenize(*c.rewrite, mode).size() : 0);
            pos.add(c, kPosTypeCount);
            chunk.add(c, kChunkCount);
            rpos.add(c, kRewritePosTypeCount);
            rchunk.add(c, kRewriteChunkCount);
            ++s.n;
        }
    }
    if (s.n == 0) throw InputError("no selected examples to analyze");
    s.mean_incomplete_len = inc_len / static_cast<double>(s.n);
    s.mean_rewrite_len = rew_len / static_cast<double>(s.n);
    s.mean_pos_types = pos.value();
    s.mean_chunks = chunk.value();
    s.mean_rewrite_pos_types = rpos.value();
    s.mean_rewrite_chunks = rchunk.value();
    return s;
}

void write_complexity_table(std::ostream& out, const std::vector<std::pair<std::string, ComplexityStats>>& rows) {
    std::size_t w = 5;
    for (const auto& [label, s] : rows) w = std::max(w, label.size());
    auto pad = [&](const std::string& s) { return s + std::string(w - s.size(), ' '); };
    auto cell = [](const std::string& s) { return std::string(s.size() < 8 ? 8 - s.size() : 0, ' ') + s; };
    out << pad("") << " |" << "              Incomplete" << " |" << "               Rewritten" << '\n';
    out << pad("Model") << " |" << cell("Length") << cell("POS") << cell("Chunk") << " |" << cell("Length")
        << cell("POS") << cell("Chunk") << '\n';
    out << std::string(w, '-') << "-+" << std::string(24, '-') << "-+" << std::string(24, '-') << '\n';
    for (const auto& [label, s] : rows) {
        out << pad(label) << " |" << cell(fmt2(s.mean_incomplete_len)) << cell(fmt2(s.mean_pos_types))
            << cell(fmt2(s.mean_chunks)) << " |" << cell(fmt2(s.mean_rewrite_len))
            << cell(fmt2(s.mean_rewrite_pos_types)) << cell(fmt2(s.mean_rewrite_chunks)) << '\n';
    }
}

void write_complexity_json(std::ostream& out, const std::vector<std::pair<std::string, ComplexityStats>>& rows) {
    for (const auto& [label, s] : rows) {
        nlohmann::ordered_json j;
        j["label"] = label;
        j["n"] = s.n;
        j["incomplete_length"] = s.mean_incomplete_len;
        if (s.mean_pos_types) j["incomplete_pos_types"] = *s.mean_pos_types;
        if (s.mean_chunks) j["incomplete_chunks"] = *s.mean_chunks;
        j["rewrite_length"] = s.mean_rewrite_len;
        if (s.mean_rewrite_pos_types) j["rewrite_pos_types"] = *s.mean_rewrite_pos_types;
        if (s.mean_rewrite_chunks) j["rewrite_chunks"] = *s.mean_rewrite_chunks;
        out << j.dump() << '\n';
    }
}

ComplexityMetric parse_complexity_metric(std::string_view name) {
    if (name == "length") return ComplexityMetric::length;
    if (name == "pos") return ComplexityMetric::pos;
    if (name == "chunk") return ComplexityMetric::chunk;
    throw InputError("unknown complexity metric '" + std::string(name) + "' (expected length|pos|chunk)");
}

std::vector<std::string> select_by_complexity(std::span<const DialogueCase> candidates, ComplexityMetric metric,
                                              std::size_t k, TokenizeMode mode) {
    std::vector<double> values;
    std::vector<std::string> ids;
    values.reserve(candidates.size());
    for (const auto& c : candidates) {
        ids.push_back(c.id);
        if (metric == ComplexityMetric::length) {
            values.push_back(static_cast<double>(tokenize(c.incomplete, mode).size()));
            continue;
        }
        const char* key = metric == ComplexityMetric::pos ? kPosTypeCount : kChunkCount;
        auto it = c.annotations.find(key);
        if (it == c.annotations.end()) {
            throw InputError("candidate '" + c.id + "' has no '" + key + "' annotation");
        }
        values.push_back(static_cast<double>(it->second));
    }
    std::vector<std::string> out;
    for (auto i : top_k_by_score(values, ids, k)) out.push_back(ids[i]);
    return out;
}

ComplexitySelector::ComplexitySelector(std::span<const DialogueCase> candidates, ComplexityMetric metric,
                                       TokenizeMode mode)
    : ranked_(select_by_complexity(candidates, metric, candidates.size(), mode)), metric_(metric) {}

std::vector<std::string> ComplexitySelector::select(const DialogueCase&, std::size_t k) const {
    if (k > ranked_.size()) throw InputError("cannot select " + std::to_string(k) + " examples");
    return {ranked_.begin(), ranked_.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::string ComplexitySelector::label() const {
    switch (metric_) {
        case ComplexityMetric::length: return "Length";
        case ComplexityMetric::pos: return "POS";
        case ComplexityMetric::chunk: return "Chunk";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "shots") return SweepAxis::shots;
    if (name == "candidates") return SweepAxis::candidates;
    if (name == "train_size" || name == "train") return SweepAxis::train_size;
    throw InputError("unknown sweep axis '" + std::string(name) + "' (expected shots|candidates|train_size)");
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::shots: return "shots";
        case SweepAxis::candidates: return "candidates";
        case SweepAxis::train_size: return "train_size";
    }
    return "?";
}

std::vector<DialogueCase> seeded_subset(std::span<const DialogueCase> cases, std::size_t n, std::uint64_t seed,
                                        std::string_view label) {
    if (n > cases.size()) {
        throw InputError("requested " + std::to_string(n) + " cases but only " + std::to_string(cases.size()) +
                         " are available");
    }
    std::vector<std::size_t> order(cases.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, {"subset", label, std::to_string(n)}));
    std::shuffle(order.begin(), order.end(), rng.engine());
    order.resize(n);
    std::sort(order.begin(), order.end());
    std::vector<DialogueCase> out;
    out.reserve(n);
    for (auto i : order) out.push_back(cases[i]);
    return out;
}

std::vector<SweepRow> sweep(const SweepInputs& inputs, SweepAxis axis, std::span<const std::size_t> values,
                            const TrainConfig& base) {
    if (values.empty()) throw InputError("sweep needs at least one value");
    std::vector<SweepRow> rows;
    for (auto value : values) {
        CorpusSplit split = inputs.split;
        TrainConfig cfg = base;
        switch (axis) {
            case SweepAxis::shots: cfg.shots = value; break;
            case SweepAxis::candidates:
                split.candidates = seeded_subset(inputs.split.candidates, value, base.seed, "candidates");
                break;
            case SweepAxis::train_size:
                split.train = seeded_subset(inputs.split.train, value, base.seed, "train");
                break;
        }
        validate_split(split);
        CaseIndex index(split);
        auto generator = inputs.make_generator(split);
        EpisodeContext ctx{split, index, *generator, inputs.tmpl, inputs.request, inputs.mode, inputs.jobs};
        Trainer trainer(ctx, inputs.table, cfg);
        SweepRow row;
        row.value = value;
        row.fit = trainer.fit();
        PolicySelector selector(row.fit.best.params, inputs.table, ids_of(split.candidates));
        row.result = evaluate_selector(ctx, selector, split.role(inputs.eval_split), cfg.shots);
        switch (axis) {
            case SweepAxis::shots: row.result.label = "Ours-" + std::to_string(value); break;
            case SweepAxis::candidates:
                row.result.label = "Ours (" + std::to_string(split.candidates.size()) + "-" +
                                   std::to_string(split.train.size()) + ")";
                break;
            case SweepAxis::train_size:
                row.result.label = "Ours (" + std::to_string(split.candidates.size()) + "-" +
                                   std::to_string(split.train.size()) + ")";
                break;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace demosel

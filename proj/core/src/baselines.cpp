#include "demosel/baselines.hpp"

#include "demosel/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace demosel {

std::vector<std::string> select_random(std::span<const std::string> candidates, std::size_t k, Rng& rng) {
    if (k > candidates.size()) {
        throw InputError("cannot select " + std::to_string(k) + " examples from " + std::to_string(candidates.size()) +
                    " candidates");
    }
    // Partial Fisher-Yates: the first k slots are the draws in order.
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.below(order.size() - i);
        std::swap(order[i], order[j]);
        out.push_back(candidates[order[i]]);
    }
    return out;
}

TokenMap load_token_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open token map " + path.string());
    TokenMap map;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected token<TAB>replacement");
        }
        map.insert_or_assign(line.substr(0, tab), line.substr(tab + 1));
    }
    return map;
}

Bm25Index::Bm25Index(std::span<const DialogueCase> docs, Params params, TokenizeMode mode, TokenMap token_map)
    : params_(params), mode_(mode), token_map_(std::move(token_map)) {
    if (docs.empty()) throw Error("BM25 index over an empty candidate set");
    std::unordered_map<std::string, std::size_t> doc_freq;
    std::size_t total_len = 0;
    for (const auto& d : docs) {
        ids_.push_back(d.id);
        const auto tokens = query_tokens(d);
        std::unordered_map<std::string, std::size_t> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [term, count] : tf) ++doc_freq[term];
        lengths_.push_back(tokens.size());
        total_len += tokens.size();
        term_freqs_.push_back(std::move(tf));
    }
    avg_len_ = static_cast<double>(total_len) / static_cast<double>(docs.size());
    if (!(avg_len_ > 0.0)) throw Error("BM25 index has zero average document length");
    const auto n = static_cast<double>(docs.size());
    for (const auto& [term, df] : doc_freq) {
        const auto dfd = static_cast<double>(df);
        idf_[term] = std::log(1.0 + (n - dfd + 0.5) / (dfd + 0.5));
    }
}

double Bm25Index::idf(const std::string& term) const {
    auto it = idf_.find(term);
    return it == idf_.end() ? 0.0 : it->second;
}

Tokens Bm25Index::query_tokens(const DialogueCase& c) const {
    Tokens out;
    auto add = [&](std::string_view text) {
        for (auto& t : tokenize(text, mode_)) {
            auto it = token_map_.find(t);
            out.push_back(it == token_map_.end() ? std::move(t) : it->second);
        }
    };
    for (const auto& turn : c.context) add(turn);
    add(c.incomplete);
    return out;
}

std::vector<double> Bm25Index::scores(const Tokens& query) const {
    std::vector<double> out(ids_.size(), 0.0);
    for (std::size_t d = 0; d < ids_.size(); ++d) {
        const double norm = params_.k1 * (1.0 - params_.b + params_.b * static_cast<double>(lengths_[d]) / avg_len_);
        for (const auto& term : query) {
            auto it = term_freqs_[d].find(term);
            if (it == term_freqs_[d].end()) continue;
            const auto tf = static_cast<double>(it->second);
            out[d] += idf(term) * tf * (params_.k1 + 1.0) / (tf + norm);
        }
    }
    return out;
}

std::vector<std::size_t> top_k_by_score(std::span<const double> scores, std::span<const std::string> ids,
                                        std::size_t k) {
    if (k > scores.size()) {
        throw InputError("cannot select " + std::to_string(k) + " examples from " + std::to_string(scores.size()) +
                    " candidates");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return ids[a] < ids[b];
                      });
    order.resize(k);
    return order;
}

std::vector<std::string> bm25_select(const Bm25Index& index, const DialogueCase& test, std::size_t k) {
    if (index.size() == 0) throw Error("BM25 selection over an empty index");
    const auto s = index.scores(index.query_tokens(test));
    std::vector<std::string> out;
    for (auto i : top_k_by_score(s, index.ids(), k)) out.push_back(index.ids()[i]);
    return out;
}

std::vector<std::string> knn_select(const EmbeddingTable& table, std::span<const std::string> candidates,
                                    std::string_view test_id, std::size_t k) {
    const auto& x = table.at(test_id);
    const double xn = x.norm();
    std::vector<double> sims;
    sims.reserve(candidates.size());
    for (const auto& id : candidates) {
        const auto& v = table.at(id);
        sims.push_back(v.dot(x) / (v.norm() * xn));
    }
    std::vector<std::string> out;
    for (auto i : top_k_by_score(sims, candidates, k)) out.push_back(candidates[i]);
    return out;
}

RandomSelector::RandomSelector(std::vector<std::string> candidates, std::uint64_t seed)
    : candidates_(std::move(candidates)), seed_(seed) {}

std::vector<std::string> RandomSelector::select(const DialogueCase& test, std::size_t k) const {
    Rng rng(derive_seed(seed_, {"random-selector", test.id}));
    return select_random(candidates_, k, rng);
}

std::vector<std::string> Bm25Selector::select(const DialogueCase& test, std::size_t k) const {
    return bm25_select(index_, test, k);
}

std::vector<std::string> KnnSelector::select(const DialogueCase& test, std::size_t k) const {
    return knn_select(table_, candidates_, test.id, k);
}

PolicySelector::PolicySelector(PolicyParams params, const EmbeddingTable& table, std::vector<std::string> candidates)
    : params_(std::move(params)), table_(table), pool_(table, std::move(candidates)) {
    if (params_.dim() != table.dim()) throw InputError("policy dimension does not match the embedding table");
}

std::vector<std::string> PolicySelector::select(const DialogueCase& test, std::size_t k) const {
    return argmax_demonstration(params_, pool_, table_.at(test.id), k).selected;
}

SelectionMap load_selections(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open selection file " + path.string());
    SelectionMap out;
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
        if (!rec.is_object() || !rec.contains("test_id") || !rec["test_id"].is_string() || !rec.contains("demo_ids") ||
            !rec["demo_ids"].is_array()) {
            throw InputError(where + "record needs 'test_id' and 'demo_ids'");
        }
        std::vector<std::string> ids;
        for (const auto& id : rec["demo_ids"]) {
            if (!id.is_string()) throw InputError(where + "demo ids must be strings");
            ids.push_back(id.get<std::string>());
        }
        out.insert_or_assign(rec["test_id"].get<std::string>(), std::move(ids));
    }
    return out;
}

void save_selections(const std::filesystem::path& path, const SelectionMap& selections) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write selection file " + path.string());
    for (const auto& [test_id, ids] : selections) {
        nlohmann::ordered_json rec;
        rec["test_id"] = test_id;
        rec["demo_ids"] = ids;
        out << rec.dump() << '\n';
    }
}

std::vector<std::string> FileSelector::select(const DialogueCase& test, std::size_t k) const {
    auto it = selections_.find(test.id);
    if (it == selections_.end()) throw InputError("selection file has no entry for test id '" + test.id + "'");
    if (it->second.size() < k) {
        throw InputError("selection for test id '" + test.id + "' has " + std::to_string(it->second.size()) +
                    " ids, need " + std::to_string(k));
    }
    return {it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace demosel

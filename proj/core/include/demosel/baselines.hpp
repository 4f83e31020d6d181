#pragma once

#include "demosel/corpus.hpp"
#include "demosel/encoder.hpp"
#include "demosel/policy.hpp"
#include "demosel/rng.hpp"
#include "demosel/tokenize.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace demosel {

/// Uniform k-subset without replacement, in draw order.
std::vector<std::string> select_random(std::span<const std::string> candidates, std::size_t k, Rng& rng);

/// Optional token -> stem mapping applied before BM25 indexing and querying.
using TokenMap = std::unordered_map<std::string, std::string>;

/// Reads "token<TAB>replacement" lines.
TokenMap load_token_map(const std::filesystem::path& path);

/// Okapi BM25 over candidates' context + incomplete tokens.
class Bm25Index {
public:
    struct Params {
        double k1 = 1.5;
        double b = 0.75;
    };

    Bm25Index(std::span<const DialogueCase> docs, Params params, TokenizeMode mode = TokenizeMode::word,
              TokenMap token_map = {});

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    double avg_len() const { return avg_len_; }
    double idf(const std::string& term) const;

    /// Query tokens for a case (context + incomplete, mapped).
    Tokens query_tokens(const DialogueCase& c) const;

    /// Score of every document for `query`, in ids() order.
    std::vector<double> scores(const Tokens& query) const;

private:
    Params params_;
    TokenizeMode mode_;
    TokenMap token_map_;
    std::vector<std::string> ids_;
    std::vector<std::unordered_map<std::string, std::size_t>> term_freqs_;
    std::vector<std::size_t> lengths_;
    double avg_len_ = 0.0;
    std::unordered_map<std::string, double> idf_;
};

/// Top-k documents by BM25 score; ties go to the smaller id.
std::vector<std::string> bm25_select(const Bm25Index& index, const DialogueCase& test, std::size_t k);

/// Top-k candidates by cosine similarity to the test vector; ties go to the
/// smaller id.
std::vector<std::string> knn_select(const EmbeddingTable& table, std::span<const std::string> candidates,
                                    std::string_view test_id, std::size_t k);

/// Indices of the k largest values, descending, ties broken by the smaller id.
std::vector<std::size_t> top_k_by_score(std::span<const double> scores, std::span<const std::string> ids,
                                        std::size_t k);

/// Picks demonstration ids for one test case. Implementations are const and
/// depend only on the test case, so evaluation order never changes results.
class Selector {
public:
    virtual ~Selector() = default;
    virtual std::vector<std::string> select(const DialogueCase& test, std::size_t k) const = 0;
    virtual std::string label() const = 0;
};

class RandomSelector : public Selector {
public:
    RandomSelector(std::vector<std::string> candidates, std::uint64_t seed);
    std::vector<std::string> select(const DialogueCase& test, std::size_t k) const override;
    std::string label() const override { return "Random"; }

private:
    std::vector<std::string> candidates_;
    std::uint64_t seed_;
};

class Bm25Selector : public Selector {
public:
    explicit Bm25Selector(Bm25Index index) : index_(std::move(index)) {}
    std::vector<std::string> select(const DialogueCase& test, std::size_t k) const override;
    std::string label() const override { return "BM25"; }

private:
    Bm25Index index_;
};

class KnnSelector : public Selector {
public:
    KnnSelector(const EmbeddingTable& table, std::vector<std::string> candidates)
        : table_(table), candidates_(std::move(candidates)) {}
    std::vector<std::string> select(const DialogueCase& test, std::size_t k) const override;
    std::string label() const override { return "KATE"; }

private:
    const EmbeddingTable& table_;
    std::vector<std::string> candidates_;
};

/// Greedy decoding of a trained bilinear policy.
class PolicySelector : public Selector {
public:
    PolicySelector(PolicyParams params, const EmbeddingTable& table, std::vector<std::string> candidates);
    std::vector<std::string> select(const DialogueCase& test, std::size_t k) const override;
    std::string label() const override { return "Ours"; }

private:
    PolicyParams params_;
    const EmbeddingTable& table_;
    CandidatePool pool_;
};

/// Precomputed {test_id -> ordered demo ids}, e.g. from an external method.
using SelectionMap = std::map<std::string, std::vector<std::string>>;

SelectionMap load_selections(const std::filesystem::path& path);
void save_selections(const std::filesystem::path& path, const SelectionMap& selections);

class FileSelector : public Selector {
public:
    FileSelector(SelectionMap selections, std::string label) : selections_(std::move(selections)), label_(std::move(label)) {}
    /// Throws Error naming the test id when it has no entry. Uses the first k ids.
    std::vector<std::string> select(const DialogueCase& test, std::size_t k) const override;
    std::string label() const override { return label_; }

private:
    SelectionMap selections_;
    std::string label_;
};

}  // namespace demosel

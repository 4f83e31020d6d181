#pragma once

#include "demosel/baselines.hpp"
#include "demosel/corpus.hpp"
#include "demosel/evaluation.hpp"
#include "demosel/trainer.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace demosel {

/// Averages over every selected example (with multiplicity). POS and chunk
/// fields are present only when every selected case carries the annotation.
struct ComplexityStats {
    double mean_incomplete_len = 0.0;
    double mean_rewrite_len = 0.0;
    std::optional<double> mean_pos_types;
    std::optional<double> mean_chunks;
    std::optional<double> mean_rewrite_pos_types;
    std::optional<double> mean_rewrite_chunks;
    std::size_t n = 0;
};

inline constexpr const char* kPosTypeCount = "pos_type_count";
inline constexpr const char* kChunkCount = "chunk_count";
inline constexpr const char* kRewritePosTypeCount = "rewrite_pos_type_count";
inline constexpr const char* kRewriteChunkCount = "rewrite_chunk_count";

/// Sidecar records {id, pos_type_count, chunk_count, rewrite_*?}; merged into
/// the matching cases' annotations. Returns the number of ids not found.
std::size_t merge_annotations(const std::filesystem::path& path, CorpusSplit& split);

ComplexityStats complexity_of_selection(const CaseIndex& index, const SelectionMap& selections,
                                        TokenizeMode mode = TokenizeMode::word);

/// Two-group layout: Incomplete (Length POS Chunk) and
/// Rewritten (Length POS Chunk); absent columns print as "-".
void write_complexity_table(std::ostream& out, const std::vector<std::pair<std::string, ComplexityStats>>& rows);
void write_complexity_json(std::ostream& out, const std::vector<std::pair<std::string, ComplexityStats>>& rows);

enum class ComplexityMetric { length, pos, chunk };

ComplexityMetric parse_complexity_metric(std::string_view name);

/// Top-k candidates by the metric on the incomplete utterance, ties by the
/// smaller id. Throws InputError when pos/chunk annotations are missing.
std::vector<std::string> select_by_complexity(std::span<const DialogueCase> candidates, ComplexityMetric metric,
                                              std::size_t k, TokenizeMode mode = TokenizeMode::word);

/// The same k ids for every test case.
class ComplexitySelector : public Selector {
public:
    ComplexitySelector(std::span<const DialogueCase> candidates, ComplexityMetric metric, TokenizeMode mode);
    std::vector<std::string> select(const DialogueCase& test, std::size_t k) const override;
    std::string label() const override;

private:
    std::vector<std::string> ranked_;
    ComplexityMetric metric_;
};

enum class SweepAxis { shots, candidates, train_size };

SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// Ingredients for fit + evaluate on a (possibly resized) corpus.
struct SweepInputs {
    const CorpusSplit& split;
    const EmbeddingTable& table;
    /// Builds a generator for a given split; the simulated backend needs the
    /// resized corpus, remote backends can ignore it.
    std::function<std::unique_ptr<Generator>(const CorpusSplit&)> make_generator;
    PromptTemplate tmpl;
    GenRequest request;
    TokenizeMode mode = TokenizeMode::word;
    std::size_t jobs = 1;
    SplitRole eval_split = SplitRole::dev;
};

struct SweepRow {
    std::size_t value = 0;
    EvaluationResult result;
    FitResult fit;
};

/// One fit + greedy evaluation per value with the shared base seed. Candidate
/// and train sweeps take seeded subsets of the respective split.
std::vector<SweepRow> sweep(const SweepInputs& inputs, SweepAxis axis, std::span<const std::size_t> values,
                            const TrainConfig& base);

/// Subset of `cases` of size n chosen by a seeded shuffle, in original order.
std::vector<DialogueCase> seeded_subset(std::span<const DialogueCase> cases, std::size_t n, std::uint64_t seed,
                                        std::string_view label);

}  // namespace demosel

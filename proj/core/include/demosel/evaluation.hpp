#pragma once

#include "demosel/baselines.hpp"
#include "demosel/corpus.hpp"
#include "demosel/generator.hpp"
#include "demosel/metrics.hpp"
#include "demosel/prompt.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace demosel {

/// Everything one episode needs: the corpus, the generation boundary and
/// the prompt layout. Shared read-only across worker threads.
struct EpisodeContext {
    const CorpusSplit& split;
    const CaseIndex& index;
    Generator& generator;
    PromptTemplate tmpl;
    GenRequest request;  // prompt is filled per episode
    TokenizeMode mode = TokenizeMode::word;
    std::size_t jobs = 1;
};

struct EpisodeResult {
    std::string test_id;
    std::vector<std::string> demo_ids;
    std::string prompt;
    std::string generated;
    MetricReport metrics;
};

/// Renders the demonstration for `test`, generates and scores against the
/// gold rewrite. Throws GenerationError from the backend, Error otherwise.
EpisodeResult run_episode(const EpisodeContext& ctx, const DialogueCase& test, std::span<const std::string> demo_ids);

struct EvaluationResult {
    std::string label;
    MetricReport mean;
    std::vector<EpisodeResult> episodes;
};

/// Mean metrics of `selector` over `cases`, evaluated with ctx.jobs workers.
EvaluationResult evaluate_selector(const EpisodeContext& ctx, const Selector& selector,
                                   std::span<const DialogueCase> cases, std::size_t k);

/// Column order RL R1 R2 | B1..B4 | F1..F3, values x100 with two decimals.
void write_metric_table(std::ostream& out, std::span<const EvaluationResult> rows);
std::string metric_table(std::span<const EvaluationResult> rows);

/// One JSON object per row: {label, n, rougeL, rouge1, rouge2, bleu1..4, f1..3}.
void write_metric_json(std::ostream& out, std::span<const EvaluationResult> rows);

}  // namespace demosel

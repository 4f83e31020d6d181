#pragma once

#include "demosel/corpus.hpp"
#include "demosel/generator.hpp"
#include "demosel/prompt.hpp"
#include "demosel/tokenize.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

namespace demosel {

inline constexpr double kSimMaxCorruption = 0.6;

/// Offline stand-in for an LLM. With m of the k demonstrations sharing the
/// test case's omission type, each restored token of the gold rewrite is
/// dropped with probability rho_max * (1 - m / k). The noise stream depends
/// on the demonstration id multiset, never on its order.
std::string sim_generate(const CaseIndex& index, std::string_view test_id, std::span<const std::string> demo_ids,
                         std::uint64_t noise_seed, double rho_max = kSimMaxCorruption,
                         TokenizeMode mode = TokenizeMode::word);

/// Generator backend that reads the cases back out of a rendered prompt
/// and answers with sim_generate. The prompt must have been rendered with
/// the same template from cases in `split`.
class SimulatedGenerator : public Generator {
public:
    SimulatedGenerator(const CorpusSplit& split, PromptTemplate tmpl, std::uint64_t noise_seed,
                       TokenizeMode mode = TokenizeMode::word);

    GenResponse complete(const GenRequest& req) override;

private:
    const CorpusSplit& split_;
    CaseIndex index_;
    PromptTemplate tmpl_;
    std::uint64_t noise_seed_;
    TokenizeMode mode_;
    std::unordered_map<std::string, std::string> example_blocks_;
    std::unordered_map<std::string, std::string> test_blocks_;
};

}  // namespace demosel

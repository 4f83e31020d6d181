#include "demosel/sim_generator.hpp"

#include "demosel/rng.hpp"

#include <algorithm>
#include <chrono>

namespace demosel {

std::string sim_generate(const CaseIndex& index, std::string_view test_id, std::span<const std::string> demo_ids,
                         std::uint64_t noise_seed, double rho_max, TokenizeMode mode) {
    const auto& test = index.at(test_id);
    if (!test.omission_type) throw InputError("case '" + test.id + "' has no omission_type");
    if (!test.rewrite) throw InputError("case '" + test.id + "' has no gold rewrite");

    std::size_t matched = 0;
    for (const auto& id : demo_ids) {
        const auto& demo = index.at(id);
        if (!demo.omission_type) throw InputError("case '" + demo.id + "' has no omission_type");
        if (*demo.omission_type == *test.omission_type) ++matched;
    }
    const double rho = demo_ids.empty()
                           ? rho_max
                           : rho_max * (1.0 - static_cast<double>(matched) / static_cast<double>(demo_ids.size()));

    std::vector<std::string> sorted(demo_ids.begin(), demo_ids.end());
    std::sort(sorted.begin(), sorted.end());
    std::string key(test_id);
    for (const auto& id : sorted) {
        key += '\x1f';
        key += id;
    }
    Rng noise(derive_seed(noise_seed, {"sim-noise", key}));

    // Walk the gold rewrite, consuming the incomplete utterance as a multiset;
    // whatever is left over is a restored token and may be dropped.
    std::unordered_map<std::string, std::size_t> remaining;
    for (auto& t : tokenize(test.incomplete, mode)) ++remaining[t];
    Tokens out;
    for (auto& tok : tokenize(*test.rewrite, mode)) {
        auto it = remaining.find(tok);
        if (it != remaining.end() && it->second > 0) {
            --it->second;
            out.push_back(std::move(tok));
            continue;
        }
        if (noise.uniform() >= rho) out.push_back(std::move(tok));
    }
    return join_tokens(out, mode == TokenizeMode::chars ? "" : " ");
}

SimulatedGenerator::SimulatedGenerator(const CorpusSplit& split, PromptTemplate tmpl, std::uint64_t noise_seed,
                                       TokenizeMode mode)
    : split_(split), index_(split), tmpl_(std::move(tmpl)), noise_seed_(noise_seed), mode_(mode) {
    for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev, SplitRole::test}) {
        for (const auto& c : split_.role(role)) {
            if (c.rewrite) example_blocks_.emplace(render_case_block(tmpl_, as_rendered(c, true)), c.id);
            // On a collision the first case keeps the key; synth corpora never collide.
            test_blocks_.emplace(render_case_block(tmpl_, as_rendered(c, false)), c.id);
        }
    }
}

GenResponse SimulatedGenerator::complete(const GenRequest& req) {
    const auto start = std::chrono::steady_clock::now();
    const auto parsed = parse_prompt(tmpl_, req.prompt);
    std::vector<std::string> demo_ids;
    for (const auto& ex : parsed.examples) {
        auto it = example_blocks_.find(render_case_block(tmpl_, ex));
        if (it == example_blocks_.end()) throw GenerationError("prompt example does not match any corpus case");
        demo_ids.push_back(it->second);
    }
    auto it = test_blocks_.find(render_case_block(tmpl_, parsed.test));
    if (it == test_blocks_.end()) throw GenerationError("prompt test case does not match any corpus case");

    GenResponse resp;
    resp.text = tmpl_.rewrite_label + " " + sim_generate(index_, it->second, demo_ids, noise_seed_, kSimMaxCorruption, mode_);
    resp.latency = std::chrono::steady_clock::now() - start;
    return resp;
}

}  // namespace demosel

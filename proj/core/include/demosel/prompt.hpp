#pragma once

#include "demosel/corpus.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace demosel {

enum class ExampleOrder { sampling, reverse };

ExampleOrder parse_example_order(std::string_view name);
std::string_view to_string(ExampleOrder order);

enum class Language { english, chinese };

Language parse_language(std::string_view name);

/// The task instruction placed at the top of every prompt.
const std::string& default_instruction(Language language);

struct PromptTemplate {
    std::string instruction = default_instruction(Language::english);
    std::string context_label = "Context:";
    std::string incomplete_label = "Incomplete:";
    std::string rewrite_label = "Rewrite:";
    ExampleOrder order = ExampleOrder::sampling;
};

/// Reads {instruction?, language?, context_label?, incomplete_label?,
/// rewrite_label?, order?} from a JSON file; absent keys keep defaults.
PromptTemplate load_template(const std::filesystem::path& path);

/// Layout, blocks separated by one blank line:
///
///     <instruction>
///
///     Context:
///       <turn 1>
///       <turn 2>
///     Incomplete: <utterance>
///     Rewrite: <rewrite>
///
///     ... (one block per example) ...
///
///     Context:
///       ...
///     Incomplete: <test utterance>
///     Rewrite:
///
/// Utterances are escaped (backslash and newline) so rendering is injective.
std::string render(const PromptTemplate& tmpl, std::span<const DialogueCase* const> examples,
                   const DialogueCase& test);
std::string render(const PromptTemplate& tmpl, std::span<const DialogueCase> examples, const DialogueCase& test);

/// One case as recovered from a prompt.
struct RenderedCase {
    std::vector<std::string> context;
    std::string incomplete;
    std::optional<std::string> rewrite;

    bool operator==(const RenderedCase&) const = default;
};

struct ParsedPrompt {
    std::vector<RenderedCase> examples;  // in prompt order
    RenderedCase test;
};

/// Inverse of render for prompts produced with the same template.
/// Throws Error on text that does not follow the layout.
ParsedPrompt parse_prompt(const PromptTemplate& tmpl, std::string_view prompt);

/// The exact text render() emits for one case, used as a lookup key.
std::string render_case_block(const PromptTemplate& tmpl, const RenderedCase& c);
RenderedCase as_rendered(const DialogueCase& c, bool with_rewrite);

}  // namespace demosel

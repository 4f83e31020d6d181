#include "demosel/prompt.hpp"

#include "demosel/error.hpp"

#include <json.hpp>

#include <fstream>

namespace demosel {
namespace {

constexpr std::string_view kTurnIndent = "  ";
constexpr std::string_view kBlockSep = "\n\n";

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out;
}

std::string unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            ++i;
            out += s[i] == 'n' ? '\n' : s[i];
        } else {
            out += s[i];
        }
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (;;) {
        const auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            return lines;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
}

std::optional<std::string_view> after_label(std::string_view line, std::string_view label) {
    if (line.substr(0, label.size()) != label) return std::nullopt;
    line.remove_prefix(label.size());
    if (line.empty()) return line;
    if (line.front() != ' ') return std::nullopt;
    line.remove_prefix(1);
    return line;
}

RenderedCase parse_block(const PromptTemplate& tmpl, std::string_view block, bool is_test) {
    const auto lines = split_lines(block);
    if (lines.size() < 3 || lines[0] != tmpl.context_label) throw Error("prompt block does not start with a context label");
    RenderedCase c;
    std::size_t i = 1;
    for (; i < lines.size() && lines[i].substr(0, kTurnIndent.size()) == kTurnIndent; ++i) {
        c.context.push_back(unescape(lines[i].substr(kTurnIndent.size())));
    }
    if (i + 2 != lines.size()) throw Error("prompt block has unexpected line count");
    const auto inc = after_label(lines[i], tmpl.incomplete_label);
    const auto rew = after_label(lines[i + 1], tmpl.rewrite_label);
    if (!inc || !rew) throw Error("prompt block is missing incomplete or rewrite label");
    c.incomplete = unescape(*inc);
    if (is_test) {
        if (!rew->empty()) throw Error("test block has a filled rewrite slot");
    } else {
        c.rewrite = unescape(*rew);
    }
    return c;
}

}  // namespace

ExampleOrder parse_example_order(std::string_view name) {
    if (name == "sampling") return ExampleOrder::sampling;
    if (name == "reverse") return ExampleOrder::reverse;
    throw InputError("unknown example order '" + std::string(name) + "' (expected sampling|reverse)");
}

std::string_view to_string(ExampleOrder order) { return order == ExampleOrder::reverse ? "reverse" : "sampling"; }

Language parse_language(std::string_view name) {
    if (name == "english" || name == "en") return Language::english;
    if (name == "chinese" || name == "zh") return Language::chinese;
    throw InputError("unknown language '" + std::string(name) + "' (expected english|chinese)");
}

const std::string& default_instruction(Language language) {
    static const std::string english =
        "Rewrite an incomplete utterance into an utterance which is semantically equivalent but self-contained to be "
        "understood without context. The sentence structure and expression should be consistent.";
    static const std::string chinese =
        "改写不完整的话语，使其成为语义等价、无需上下文即可独立理解的完整话语。句子结构和表达方式应保持一致。";
    return language == Language::chinese ? chinese : english;
}

PromptTemplate load_template(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open template file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed template file " + path.string() + ": " + e.what());
    }
    PromptTemplate t;
    auto get = [&](const char* key, std::string& field) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) throw InputError(std::string("template field '") + key + "' must be a string");
        field = j[key].get<std::string>();
    };
    if (j.contains("language")) t.instruction = default_instruction(parse_language(j["language"].get<std::string>()));
    get("instruction", t.instruction);
    get("context_label", t.context_label);
    get("incomplete_label", t.incomplete_label);
    get("rewrite_label", t.rewrite_label);
    if (j.contains("order")) t.order = parse_example_order(j["order"].get<std::string>());
    for (const auto* label : {&t.context_label, &t.incomplete_label, &t.rewrite_label}) {
        if (label->empty() || label->find('\n') != std::string::npos || label->substr(0, 2) == kTurnIndent) {
            throw InputError("template labels must be non-empty single lines without leading indentation");
        }
    }
    if (t.context_label == t.incomplete_label || t.incomplete_label == t.rewrite_label ||
        t.context_label == t.rewrite_label) {
        throw InputError("template labels must be distinct");
    }
    return t;
}

RenderedCase as_rendered(const DialogueCase& c, bool with_rewrite) {
    RenderedCase r{c.context, c.incomplete, std::nullopt};
    if (with_rewrite) r.rewrite = c.rewrite;
    return r;
}

std::string render_case_block(const PromptTemplate& tmpl, const RenderedCase& c) {
    std::string out = tmpl.context_label;
    out += '\n';
    for (const auto& turn : c.context) {
        out += kTurnIndent;
        out += escape(turn);
        out += '\n';
    }
    out += tmpl.incomplete_label;
    out += ' ';
    out += escape(c.incomplete);
    out += '\n';
    out += tmpl.rewrite_label;
    if (c.rewrite) {
        out += ' ';
        out += escape(*c.rewrite);
    }
    return out;
}

std::string render(const PromptTemplate& tmpl, std::span<const DialogueCase* const> examples,
                   const DialogueCase& test) {
    std::string out = tmpl.instruction;
    auto append = [&](const DialogueCase& ex) {
        if (!ex.rewrite) throw Error("demonstration example '" + ex.id + "' has no rewrite");
        out += kBlockSep;
        out += render_case_block(tmpl, as_rendered(ex, true));
    };
    if (tmpl.order == ExampleOrder::reverse) {
        for (auto it = examples.rbegin(); it != examples.rend(); ++it) append(**it);
    } else {
        for (const auto* ex : examples) append(*ex);
    }
    out += kBlockSep;
    out += render_case_block(tmpl, as_rendered(test, false));
    return out;
}

std::string render(const PromptTemplate& tmpl, std::span<const DialogueCase> examples, const DialogueCase& test) {
    std::vector<const DialogueCase*> ptrs;
    ptrs.reserve(examples.size());
    for (const auto& e : examples) ptrs.push_back(&e);
    return render(tmpl, ptrs, test);
}

ParsedPrompt parse_prompt(const PromptTemplate& tmpl, std::string_view prompt) {
    if (prompt.substr(0, tmpl.instruction.size()) != tmpl.instruction) throw Error("prompt does not start with the instruction");
    prompt.remove_prefix(tmpl.instruction.size());
    std::vector<std::string_view> blocks;
    while (!prompt.empty()) {
        if (prompt.substr(0, kBlockSep.size()) != kBlockSep) throw Error("prompt blocks must be separated by a blank line");
        prompt.remove_prefix(kBlockSep.size());
        const auto next = prompt.find(kBlockSep);
        blocks.push_back(prompt.substr(0, next));
        prompt = next == std::string_view::npos ? std::string_view{} : prompt.substr(next);
    }
    if (blocks.empty()) throw Error("prompt has no test block");
    ParsedPrompt parsed;
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) parsed.examples.push_back(parse_block(tmpl, blocks[i], false));
    parsed.test = parse_block(tmpl, blocks.back(), true);
    return parsed;
}

}  // namespace demosel

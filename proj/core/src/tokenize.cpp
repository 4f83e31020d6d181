#include "demosel/tokenize.hpp"

#include "demosel/error.hpp"

#include <cctype>

namespace demosel {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

std::size_t utf8_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xe) return 3;
    if ((lead >> 3) == 0x1e) return 4;
    return 1;  // stray continuation byte: treat as its own unit
}

void split_word(std::string_view word, Tokens& out) {
    std::size_t begin = 0;
    std::size_t end = word.size();
    while (begin < end && is_ascii_punct(static_cast<unsigned char>(word[begin]))) {
        out.emplace_back(1, word[begin]);
        ++begin;
    }
    std::size_t trail = end;
    while (trail > begin && is_ascii_punct(static_cast<unsigned char>(word[trail - 1]))) --trail;
    if (trail > begin) {
        std::string core(word.substr(begin, trail - begin));
        for (auto& c : core) {
            if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        out.push_back(std::move(core));
    }
    for (std::size_t i = trail; i < end; ++i) out.emplace_back(1, word[i]);
}

}  // namespace

Tokens tokenize(std::string_view text, TokenizeMode mode) {
    Tokens out;
    std::size_t i = 0;
    if (mode == TokenizeMode::chars) {
        while (i < text.size()) {
            const auto c = static_cast<unsigned char>(text[i]);
            if (is_space(c)) {
                ++i;
                continue;
            }
            const std::size_t len = std::min(utf8_length(c), text.size() - i);
            std::string tok(text.substr(i, len));
            if (len == 1 && c < 0x80) tok[0] = static_cast<char>(std::tolower(c));
            out.push_back(std::move(tok));
            i += len;
        }
        return out;
    }
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) split_word(text.substr(i, j - i), out);
        i = j;
    }
    return out;
}

TokenizeMode parse_tokenize_mode(std::string_view name) {
    if (name == "word") return TokenizeMode::word;
    if (name == "char" || name == "chars") return TokenizeMode::chars;
    throw InputError("unknown tokenize mode '" + std::string(name) + "' (expected word|char)");
}

std::string join_tokens(const Tokens& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

}  // namespace demosel

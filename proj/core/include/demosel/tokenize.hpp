#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace demosel {

enum class TokenizeMode { word, chars };

using Tokens = std::vector<std::string>;

/// Word mode lowercases ASCII, splits on whitespace and detaches leading and
/// trailing ASCII punctuation as one token per character ("food?" -> food, ?).
/// Char mode emits one token per non-whitespace UTF-8 code point.
Tokens tokenize(std::string_view text, TokenizeMode mode = TokenizeMode::word);

TokenizeMode parse_tokenize_mode(std::string_view name);

std::string join_tokens(const Tokens& tokens, std::string_view sep = " ");

}  // namespace demosel

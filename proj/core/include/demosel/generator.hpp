#pragma once

#include "demosel/error.hpp"

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>

namespace demosel {

struct GenRequest {
    std::string prompt;
    std::size_t max_new_tokens = 64;
    double temperature = 0.0;
    std::chrono::milliseconds timeout{30000};
};

struct GenResponse {
    std::string text;
    std::chrono::nanoseconds latency{0};
    std::size_t attempts = 1;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

/// A text-generation backend. Implementations must tolerate concurrent calls.
class Generator {
public:
    virtual ~Generator() = default;

    /// Raw completion for one prompt.
    virtual GenResponse complete(const GenRequest& req) = 0;
};

/// Validates `req`, calls the backend and post-processes the completion:
/// keeps the first non-empty line and strips an echoed rewrite label.
/// Throws GenerationError when nothing is left.
GenResponse generate(Generator& backend, const GenRequest& req, std::string_view rewrite_label = "Rewrite:");

/// First non-empty line of `text` with a leading `label` and surrounding
/// whitespace removed.
std::string clean_completion(std::string_view text, std::string_view rewrite_label);

}  // namespace demosel

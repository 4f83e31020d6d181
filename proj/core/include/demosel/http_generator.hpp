#pragma once

#include "demosel/generator.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

namespace demosel {

struct HttpGeneratorOptions {
    /// Full endpoint, e.g. http://localhost:8080/generate
    std::string url;
    /// Sent as "Authorization: Bearer <key>" when set.
    std::optional<std::string> api_key;
    std::size_t max_attempts = 3;
    /// Delay after the first failed attempt; doubles after each further failure.
    std::chrono::milliseconds initial_backoff{500};
    std::size_t max_in_flight = 4;
};

/// Reads GENERATOR_API_KEY from the environment, if present.
std::optional<std::string> api_key_from_env();

/// POSTs {prompt, max_new_tokens, temperature} as JSON and expects {text}.
/// Transport errors, 429 and 5xx responses are retried with exponential
/// backoff; other statuses fail immediately.
class HttpGenerator : public Generator {
public:
    explicit HttpGenerator(HttpGeneratorOptions options);
    ~HttpGenerator() override;

    GenResponse complete(const GenRequest& req) override;

private:
    HttpGeneratorOptions options_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace demosel

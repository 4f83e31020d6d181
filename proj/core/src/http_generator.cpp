#include "demosel/http_generator.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <thread>

namespace demosel {
namespace {

struct SemaphoreGuard {
    explicit SemaphoreGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
    ~SemaphoreGuard() { sem.release(); }
    SemaphoreGuard(const SemaphoreGuard&) = delete;
    SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;
    std::counting_semaphore<>& sem;
};

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::optional<std::string> api_key_from_env() {
    if (const char* key = std::getenv("GENERATOR_API_KEY"); key && *key) return std::string(key);
    return std::nullopt;
}

HttpGenerator::HttpGenerator(HttpGeneratorOptions options) : options_(std::move(options)) {
    const auto scheme_end = options_.url.find("://");
    if (scheme_end == std::string::npos) throw InputError("generator url needs a scheme: " + options_.url);
    const auto path_start = options_.url.find('/', scheme_end + 3);
    base_ = options_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
    if (options_.max_attempts < 1) throw InputError("max_attempts must be at least 1");
    if (options_.max_in_flight < 1) throw InputError("max_in_flight must be at least 1");
    in_flight_ = std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(options_.max_in_flight));
}

HttpGenerator::~HttpGenerator() = default;

GenResponse HttpGenerator::complete(const GenRequest& req) {
    SemaphoreGuard guard(*in_flight_);
    const auto start = std::chrono::steady_clock::now();

    nlohmann::json body = {
        {"prompt", req.prompt}, {"max_new_tokens", req.max_new_tokens}, {"temperature", req.temperature}};
    const auto payload = body.dump();
    httplib::Headers headers;
    if (options_.api_key) headers.emplace("Authorization", "Bearer " + *options_.api_key);

    std::string last_error;
    auto backoff = options_.initial_backoff;
    for (std::size_t attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        // A fresh client per attempt keeps concurrent calls independent.
        httplib::Client client(base_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(req.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(req.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            if (retryable_status(res->status)) continue;
            throw GenerationError("generator request failed: " + last_error);
        }
        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw GenerationError(std::string("generator reply is not JSON: ") + e.what());
        }
        if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
            throw GenerationError("generator reply has no string field 'text'");
        }
        GenResponse resp;
        resp.text = reply["text"].get<std::string>();
        resp.attempts = attempt;
        resp.latency = std::chrono::steady_clock::now() - start;
        return resp;
    }
    throw GenerationError("generator request failed after " + std::to_string(options_.max_attempts) +
                          " attempts: " + last_error);
}

}  // namespace demosel

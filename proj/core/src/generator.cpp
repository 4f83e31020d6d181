#include "demosel/generator.hpp"

#include <cmath>

namespace demosel {
namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string clean_completion(std::string_view text, std::string_view rewrite_label) {
    std::string_view line;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        line = trim(text.substr(0, nl));
        if (!line.empty()) break;
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    }
    if (!rewrite_label.empty() && line.substr(0, rewrite_label.size()) == rewrite_label) {
        line = trim(line.substr(rewrite_label.size()));
    }
    return std::string(line);
}

GenResponse generate(Generator& backend, const GenRequest& req, std::string_view rewrite_label) {
    if (req.max_new_tokens < 1) throw GenerationError("max_new_tokens must be at least 1");
    if (!(req.temperature >= 0.0) || !std::isfinite(req.temperature)) {
        throw GenerationError("temperature must be a finite non-negative number");
    }
    auto resp = backend.complete(req);
    resp.text = clean_completion(resp.text, rewrite_label);
    if (resp.text.empty()) throw GenerationError("empty completion");
    return resp;
}

}  // namespace demosel

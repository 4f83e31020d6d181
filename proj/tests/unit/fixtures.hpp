#pragma once

#include "demosel/corpus.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

inline std::vector<std::string> restaurant_context() {
    return {"Hello, I am looking for an expensive restaurant that serves fusion food.",
            "I 'm sorry, there are no fusion restaurants listed in the expensive price range. Would you like to try "
            "something else?"};
}

inline demosel::DialogueCase restaurant_case() {
    demosel::DialogueCase c;
    c.id = "u3";
    c.context = restaurant_context();
    c.incomplete = "How about Mediterranean food?";
    c.rewrite = "How about Mediterranean food in expensive price range?";
    return c;
}

// The two candidate examples shown next to the restaurant case. Their own
// context is not given, so they reuse the restaurant dialogue.
inline demosel::DialogueCase serving_example() {
    demosel::DialogueCase c;
    c.id = "e1";
    c.context = restaurant_context();
    c.incomplete = "How about serving Mediterranean food?";
    c.rewrite = "How about a cheap restaurant serving Mediterranean food?";
    return c;
}

inline demosel::DialogueCase recommend_example() {
    demosel::DialogueCase c;
    c.id = "e2";
    c.context = restaurant_context();
    c.incomplete = "Can you recommend a restaurant to me? I don't want to spend a lot of money.";
    c.rewrite = "Can you recommend a restaurant to me in the south part of town? I don't want to spend a lot of money.";
    return c;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("demosel-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace fixtures

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace demosel {

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent seed from a parent seed and a chain of labels.
/// All randomness in a run flows from one seed through these named substreams.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::string_view> labels);

class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Uniform in [0, 1).
    double uniform();

    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);

    Rng substream(std::initializer_list<std::string_view> labels) const;

    std::uint64_t seed() const { return seed_; }

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
    std::uint64_t seed_;
};

}  // namespace demosel

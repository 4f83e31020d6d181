#include "demosel/rng.hpp"

namespace demosel {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::string_view> labels) {
    std::uint64_t h = splitmix64(parent);
    for (auto label : labels) {
        // Length prefix keeps ("ab","c") and ("a","bc") apart.
        h = splitmix64(h ^ label.size());
        h = splitmix64(h ^ fnv1a64(label));
    }
    return h;
}

double Rng::uniform() {
    // 53 random bits -> [0, 1); avoids generate_canonical returning 1.0.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

Rng Rng::substream(std::initializer_list<std::string_view> labels) const {
    return Rng(derive_seed(seed_, labels));
}

}  // namespace demosel

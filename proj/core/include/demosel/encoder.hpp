#pragma once

#include "demosel/corpus.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace demosel {

/// Dense case representations keyed by case id. Vectors are stored raw;
/// scoring normalizes them.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(std::string_view id) const { return vectors_.count(std::string(id)) != 0; }

    /// Throws Error naming the id when it is absent.
    const Eigen::VectorXd& at(std::string_view id) const;

    /// Validates dimension, finiteness and non-zero norm. Replaces any
    /// existing vector for `id`.
    void insert(std::string id, Eigen::VectorXd v);

    /// Ids in lexicographic order.
    std::vector<std::string> ids() const;

    bool operator==(const EmbeddingTable&) const;

private:
    std::size_t dim_;
    std::unordered_map<std::string, Eigen::VectorXd> vectors_;
};

struct VectorsLoad {
    EmbeddingTable table;
    /// Lines whose id had already been seen; the last occurrence wins.
    std::size_t duplicate_lines = 0;
};

VectorsLoad parse_vectors(std::istream& in, std::span<const std::string> expected_ids, std::string_view source);
VectorsLoad load_vectors(const std::filesystem::path& path, std::span<const std::string> expected_ids);

void write_vectors(std::ostream& out, const EmbeddingTable& table);
void save_vectors(const std::filesystem::path& path, const EmbeddingTable& table);

/// The encoder input: context turns then the incomplete utterance, one
/// space-joined string. The rewrite is never included.
std::string encoder_text(const DialogueCase& c);

/// Signed feature hashing of character 3-grams of `encoder_text(c)` into
/// dim - 1 buckets, plus a constant bias in the last bucket, L2-normalized.
Eigen::VectorXd hash_featurize(const DialogueCase& c, std::size_t dim, std::uint64_t seed);

EmbeddingTable hash_table(const CorpusSplit& split, std::size_t dim, std::uint64_t seed);

}  // namespace demosel

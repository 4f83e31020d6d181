#include "demosel/encoder.hpp"

#include "demosel/error.hpp"
#include "demosel/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace demosel {

const Eigen::VectorXd& EmbeddingTable::at(std::string_view id) const {
    auto it = vectors_.find(std::string(id));
    if (it == vectors_.end()) throw Error("missing embedding for id '" + std::string(id) + "'");
    return it->second;
}

void EmbeddingTable::insert(std::string id, Eigen::VectorXd v) {
    if (dim_ == 0) dim_ = static_cast<std::size_t>(v.size());
    if (static_cast<std::size_t>(v.size()) != dim_) {
        throw InputError("vector for '" + id + "' has dimension " + std::to_string(v.size()) + ", expected " +
                         std::to_string(dim_));
    }
    if (!v.allFinite()) throw InputError("vector for '" + id + "' has a non-finite component");
    if (v.squaredNorm() == 0.0) throw InputError("vector for '" + id + "' is all zero");
    vectors_.insert_or_assign(std::move(id), std::move(v));
}

std::vector<std::string> EmbeddingTable::ids() const {
    std::vector<std::string> out;
    out.reserve(vectors_.size());
    for (const auto& [id, v] : vectors_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

bool EmbeddingTable::operator==(const EmbeddingTable& other) const {
    if (dim_ != other.dim_ || vectors_.size() != other.vectors_.size()) return false;
    for (const auto& [id, v] : vectors_) {
        auto it = other.vectors_.find(id);
        if (it == other.vectors_.end() || it->second != v) return false;
    }
    return true;
}

VectorsLoad parse_vectors(std::istream& in, std::span<const std::string> expected_ids, std::string_view source) {
    using nlohmann::json;
    VectorsLoad out;
    std::string line;
    std::size_t lineno = 0;
    auto where = [&] { return std::string(source) + ":" + std::to_string(lineno) + ": "; };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError(where() + "malformed record: " + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
            throw InputError(where() + "record needs a string 'id'");
        }
        if (!rec.contains("vector") || !rec["vector"].is_array()) {
            throw InputError(where() + "record needs an array 'vector'");
        }
        const auto& arr = rec["vector"];
        Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number()) throw InputError(where() + "vector components must be numbers");
            v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
        }
        auto id = rec["id"].get<std::string>();
        if (out.table.contains(id)) ++out.duplicate_lines;
        try {
            out.table.insert(std::move(id), std::move(v));
        } catch (const InputError& e) {
            throw InputError(where() + e.what());
        }
    }
    for (const auto& id : expected_ids) {
        if (!out.table.contains(id)) throw InputError(std::string(source) + ": missing vector for id '" + id + "'");
    }
    return out;
}

VectorsLoad load_vectors(const std::filesystem::path& path, std::span<const std::string> expected_ids) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open vectors file " + path.string());
    return parse_vectors(in, expected_ids, path.string());
}

void write_vectors(std::ostream& out, const EmbeddingTable& table) {
    for (const auto& id : table.ids()) {
        const auto& v = table.at(id);
        nlohmann::ordered_json rec;
        rec["id"] = id;
        rec["vector"] = std::vector<double>(v.data(), v.data() + v.size());
        out << rec.dump() << '\n';
    }
}

void save_vectors(const std::filesystem::path& path, const EmbeddingTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write vectors file " + path.string());
    write_vectors(out, table);
}

std::string encoder_text(const DialogueCase& c) {
    std::string text;
    for (const auto& turn : c.context) {
        text += turn;
        text += ' ';
    }
    text += c.incomplete;
    return text;
}

Eigen::VectorXd hash_featurize(const DialogueCase& c, std::size_t dim, std::uint64_t seed) {
    if (dim < 16) throw InputError("hash dimension must be at least 16, got " + std::to_string(dim));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    const auto buckets = dim - 1;

    // Lowercased code points, whitespace runs collapsed, padded with spaces.
    std::vector<std::string> chars{" "};
    const auto text = encoder_text(c);
    for (std::size_t i = 0; i < text.size();) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xe ? 3 : (lead >> 3) == 0x1e ? 4 : 1;
        len = std::min(len, text.size() - i);
        std::string cp = text.substr(i, len);
        i += len;
        if (len == 1 && std::isspace(lead)) {
            if (chars.back() != " ") chars.emplace_back(" ");
            continue;
        }
        if (len == 1) cp[0] = static_cast<char>(std::tolower(lead));
        chars.push_back(std::move(cp));
    }
    if (chars.back() != " ") chars.emplace_back(" ");

    const auto basis = splitmix64(seed ^ 0x6a09e667f3bcc908ULL);
    for (std::size_t i = 0; i + 3 <= chars.size(); ++i) {
        const auto gram = chars[i] + chars[i + 1] + chars[i + 2];
        const auto h = splitmix64(fnv1a64(gram, basis));
        const auto bucket = static_cast<Eigen::Index>(h % buckets);
        v[bucket] += (h >> 63) ? -1.0 : 1.0;
    }
    v[static_cast<Eigen::Index>(buckets)] = 1.0;
    return v / v.norm();
}

EmbeddingTable hash_table(const CorpusSplit& split, std::size_t dim, std::uint64_t seed) {
    EmbeddingTable table(dim);
    for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev, SplitRole::test}) {
        for (const auto& c : split.role(role)) table.insert(c.id, hash_featurize(c, dim, seed));
    }
    return table;
}

}  // namespace demosel

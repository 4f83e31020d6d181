#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace demosel {

/// One incomplete-utterance-rewriting instance.
struct DialogueCase {
    std::string id;
    std::vector<std::string> context;
    std::string incomplete;
    std::optional<std::string> rewrite;
    /// Latent category; only synthetic corpora carry it.
    std::optional<std::string> omission_type;
    /// Integer side information such as pos_type_count or chunk_count.
    std::map<std::string, std::int64_t> annotations;

    bool operator==(const DialogueCase&) const = default;
};

/// Which split a file is loaded as. Candidates, train and dev records must
/// carry a rewrite; test records may omit it.
enum class SplitRole { candidates, train, dev, test };

std::string_view to_string(SplitRole role);
SplitRole parse_split_role(std::string_view name);

struct CorpusSplit {
    std::vector<DialogueCase> candidates;
    std::vector<DialogueCase> train;
    std::vector<DialogueCase> dev;
    std::vector<DialogueCase> test;

    const std::vector<DialogueCase>& role(SplitRole r) const;
    std::vector<DialogueCase>& role(SplitRole r);

    bool operator==(const CorpusSplit&) const = default;
};

/// Parses line-delimited JSON records. `source` names the input in errors.
std::vector<DialogueCase> parse_corpus(std::istream& in, SplitRole role, std::string_view source);
std::vector<DialogueCase> load_corpus(const std::filesystem::path& path, SplitRole role);

std::string serialize_case(const DialogueCase& c);
void write_corpus(std::ostream& out, const std::vector<DialogueCase>& cases);
void save_corpus(const std::filesystem::path& path, const std::vector<DialogueCase>& cases);

/// Ids must be unique across every split; this subsumes the required
/// candidates/train disjointness and keeps evaluation cases out of the pool.
void validate_split(const CorpusSplit& split);

/// Id -> case lookup over all splits. Pointers stay valid while `split` lives.
class CaseIndex {
public:
    explicit CaseIndex(const CorpusSplit& split);

    const DialogueCase& at(std::string_view id) const;
    const DialogueCase* find(std::string_view id) const;
    std::size_t size() const { return cases_.size(); }

private:
    std::unordered_map<std::string, const DialogueCase*> cases_;
};

std::vector<std::string> ids_of(const std::vector<DialogueCase>& cases);

/// Template-generated corpus over four omission types; deterministic in seed.
CorpusSplit synth_corpus(std::uint64_t seed, std::size_t n_candidates, std::size_t n_train, std::size_t n_dev);

/// The omission categories produced by synth_corpus.
const std::vector<std::string>& synth_omission_types();

}  // namespace demosel

#include "demosel/corpus.hpp"

#include "demosel/error.hpp"
#include "demosel/tokenize.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace demosel {
namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
    throw InputError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::string require_string(const json& rec, const char* field, std::string_view source, std::size_t line) {
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) fail(source, line, std::string("missing required field '") + field + "'");
    if (!it->is_string()) fail(source, line, std::string("field '") + field + "' must be a string");
    return it->get<std::string>();
}

DialogueCase parse_record(const json& rec, SplitRole role, std::string_view source, std::size_t line) {
    if (!rec.is_object()) fail(source, line, "record is not an object");
    DialogueCase c;
    c.id = require_string(rec, "id", source, line);
    if (c.id.empty()) fail(source, line, "field 'id' is empty");

    if (auto it = rec.find("context"); it != rec.end() && !it->is_null()) {
        if (!it->is_array()) fail(source, line, "field 'context' must be an array");
        for (const auto& turn : *it) {
            if (!turn.is_string()) fail(source, line, "context turns must be strings");
            c.context.push_back(turn.get<std::string>());
        }
    }

    c.incomplete = require_string(rec, "incomplete", source, line);
    if (tokenize(c.incomplete).empty()) fail(source, line, "field 'incomplete' has no tokens");

    if (auto it = rec.find("rewrite"); it != rec.end() && !it->is_null()) {
        if (!it->is_string()) fail(source, line, "field 'rewrite' must be a string");
        c.rewrite = it->get<std::string>();
    }
    if (role != SplitRole::test && (!c.rewrite || c.rewrite->empty())) {
        fail(source, line, std::string("missing required field 'rewrite' for ") + std::string(to_string(role)) + " split");
    }

    if (auto it = rec.find("omission_type"); it != rec.end() && !it->is_null()) {
        if (!it->is_string()) fail(source, line, "field 'omission_type' must be a string");
        c.omission_type = it->get<std::string>();
    }
    if (auto it = rec.find("annotations"); it != rec.end() && !it->is_null()) {
        if (!it->is_object()) fail(source, line, "field 'annotations' must be an object");
        for (const auto& [key, value] : it->items()) {
            if (!value.is_number_integer()) fail(source, line, "annotation '" + key + "' must be an integer");
            c.annotations[key] = value.get<std::int64_t>();
        }
    }
    return c;
}

}  // namespace

std::string_view to_string(SplitRole role) {
    switch (role) {
        case SplitRole::candidates: return "candidates";
        case SplitRole::train: return "train";
        case SplitRole::dev: return "dev";
        case SplitRole::test: return "test";
    }
    return "?";
}

SplitRole parse_split_role(std::string_view name) {
    if (name == "candidates") return SplitRole::candidates;
    if (name == "train") return SplitRole::train;
    if (name == "dev") return SplitRole::dev;
    if (name == "test") return SplitRole::test;
    throw InputError("unknown split role '" + std::string(name) + "'");
}

const std::vector<DialogueCase>& CorpusSplit::role(SplitRole r) const {
    switch (r) {
        case SplitRole::candidates: return candidates;
        case SplitRole::train: return train;
        case SplitRole::dev: return dev;
        case SplitRole::test: return test;
    }
    return test;
}

std::vector<DialogueCase>& CorpusSplit::role(SplitRole r) {
    return const_cast<std::vector<DialogueCase>&>(std::as_const(*this).role(r));
}

std::vector<DialogueCase> parse_corpus(std::istream& in, SplitRole role, std::string_view source) {
    std::vector<DialogueCase> cases;
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(source, lineno, std::string("malformed record: ") + e.what());
        }
        auto c = parse_record(rec, role, source, lineno);
        if (!seen.insert(c.id).second) fail(source, lineno, "duplicate id '" + c.id + "'");
        cases.push_back(std::move(c));
    }
    return cases;
}

std::vector<DialogueCase> load_corpus(const std::filesystem::path& path, SplitRole role) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus file " + path.string());
    return parse_corpus(in, role, path.string());
}

std::string serialize_case(const DialogueCase& c) {
    nlohmann::ordered_json rec;
    rec["id"] = c.id;
    rec["context"] = c.context;
    rec["incomplete"] = c.incomplete;
    if (c.rewrite) rec["rewrite"] = *c.rewrite;
    if (c.omission_type) rec["omission_type"] = *c.omission_type;
    if (!c.annotations.empty()) rec["annotations"] = c.annotations;
    return rec.dump();
}

void write_corpus(std::ostream& out, const std::vector<DialogueCase>& cases) {
    for (const auto& c : cases) out << serialize_case(c) << '\n';
}

void save_corpus(const std::filesystem::path& path, const std::vector<DialogueCase>& cases) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write corpus file " + path.string());
    write_corpus(out, cases);
}

void validate_split(const CorpusSplit& split) {
    std::set<std::string, std::less<>> seen;
    for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev, SplitRole::test}) {
        for (const auto& c : split.role(role)) {
            if (!seen.insert(c.id).second) {
                throw InputError("id '" + c.id + "' appears in more than one split (found again in " +
                                 std::string(to_string(role)) + ")");
            }
        }
    }
}

CaseIndex::CaseIndex(const CorpusSplit& split) {
    for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev, SplitRole::test}) {
        for (const auto& c : split.role(role)) {
            if (!cases_.emplace(c.id, &c).second) throw InputError("duplicate id '" + c.id + "' across splits");
        }
    }
}

const DialogueCase* CaseIndex::find(std::string_view id) const {
    auto it = cases_.find(std::string(id));
    return it == cases_.end() ? nullptr : it->second;
}

const DialogueCase& CaseIndex::at(std::string_view id) const {
    if (const auto* c = find(id)) return *c;
    throw Error("unknown case id '" + std::string(id) + "'");
}

std::vector<std::string> ids_of(const std::vector<DialogueCase>& cases) {
    std::vector<std::string> ids;
    ids.reserve(cases.size());
    for (const auto& c : cases) ids.push_back(c.id);
    return ids;
}

}  // namespace demosel

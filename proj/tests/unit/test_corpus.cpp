#include "demosel/corpus.hpp"
#include "demosel/error.hpp"
#include "demosel/metrics.hpp"
#include "demosel/tokenize.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

using namespace demosel;

namespace {

std::string error_of(const std::string& text, SplitRole role) {
    std::istringstream in(text);
    try {
        parse_corpus(in, role, "mem.jsonl");
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("corpus") {
    TEST_CASE("records load in file order") {
        std::istringstream in(
            R"({"id":"a","context":["hi"],"incomplete":"one","rewrite":"one x"})"
            "\n"
            R"({"id":"c","context":[],"incomplete":"two","rewrite":"two y"})"
            "\n\n"
            R"({"id":"b","incomplete":"three","rewrite":"three z","omission_type":"t","annotations":{"chunk_count":2}})"
            "\n");
        const auto cases = parse_corpus(in, SplitRole::candidates, "mem");
        REQUIRE(cases.size() == 3);
        CHECK(cases[0].id == "a");
        CHECK(cases[1].id == "c");
        CHECK(cases[1].context.empty());
        CHECK(cases[2].id == "b");
        CHECK(cases[2].omission_type == "t");
        CHECK(cases[2].annotations.at("chunk_count") == 2);
    }

    TEST_CASE("validation errors name the field and the line") {
        const auto msg = error_of(R"({"id":"a","incomplete":"x","rewrite":"x y"})"
                                  "\n"
                                  R"({"id":"b","rewrite":"x"})",
                                  SplitRole::candidates);
        CHECK(msg.find("mem.jsonl:2") != std::string::npos);
        CHECK(msg.find("incomplete") != std::string::npos);

        CHECK(error_of(R"({"id":"a","incomplete":"x"})", SplitRole::train).find("rewrite") != std::string::npos);
        CHECK(error_of(R"({"id":"a","incomplete":"x"})", SplitRole::test).empty());
        CHECK(error_of(R"({"id":"a","incomplete":"x","rewrite":"y"})"
                       "\n"
                       R"({"id":"a","incomplete":"z","rewrite":"w"})",
                       SplitRole::dev)
                  .find("duplicate") != std::string::npos);
        CHECK(error_of("{not json", SplitRole::dev).find("mem.jsonl:1") != std::string::npos);
        CHECK(!error_of(R"({"id":"a","incomplete":" ","rewrite":"y"})", SplitRole::dev).empty());
        CHECK(!error_of(R"({"id":"a","incomplete":"x","rewrite":"y","context":"flat"})", SplitRole::dev).empty());
    }

    TEST_CASE("restaurant case survives save and reload") {
        fixtures::TempDir dir("corpus");
        auto c = fixtures::restaurant_case();
        c.annotations["pos_type_count"] = 4;
        const std::vector<DialogueCase> cases = {c, fixtures::serving_example()};
        save_corpus(dir / "c.jsonl", cases);
        const auto once = load_corpus(dir / "c.jsonl", SplitRole::candidates);
        CHECK(once == cases);
        save_corpus(dir / "d.jsonl", once);
        CHECK(load_corpus(dir / "d.jsonl", SplitRole::candidates) == cases);
    }

    TEST_CASE("missing corpus file is an input error") {
        CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl", SplitRole::dev), InputError);
    }

    TEST_CASE("ids must be unique across splits") {
        CorpusSplit s;
        s.candidates = {fixtures::serving_example()};
        s.train = {fixtures::serving_example()};
        CHECK_THROWS_AS(validate_split(s), InputError);
        s.train = {fixtures::recommend_example()};
        CHECK_NOTHROW(validate_split(s));
        CaseIndex index(s);
        CHECK(index.at("e2").incomplete == fixtures::recommend_example().incomplete);
        CHECK(index.find("zz") == nullptr);
        CHECK_THROWS_AS(index.at("zz"), Error);
    }

    TEST_CASE("synthetic corpus is deterministic in its seed") {
        const auto a = synth_corpus(7, 200, 200, 100);
        const auto b = synth_corpus(7, 200, 200, 100);
        CHECK(a == b);
        std::ostringstream sa, sb;
        write_corpus(sa, a.candidates);
        write_corpus(sb, b.candidates);
        CHECK(sa.str() == sb.str());
        CHECK(!(synth_corpus(8, 200, 200, 100) == a));
        CHECK(a.candidates.size() == 200);
        CHECK(a.train.size() == 200);
        CHECK(a.dev.size() == 100);
    }

    TEST_CASE("synthetic rewrites keep the incomplete utterance") {
        const auto s = synth_corpus(3, 100, 100, 50);
        for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev}) {
            for (const auto& c : s.role(role)) {
                const auto inc = tokenize(c.incomplete);
                const auto rew = tokenize(*c.rewrite);
                CHECK(restored_tokens(inc, rew).empty());
                CHECK(rew.size() > inc.size());
                CHECK(c.omission_type.has_value());
                CHECK(c.context.size() == 3);
            }
        }
    }

    TEST_CASE("omission types are balanced over 200 candidates") {
        const auto s = synth_corpus(0, 200, 200, 100);
        std::map<std::string, int> hist;
        for (const auto& c : s.candidates) ++hist[*c.omission_type];
        REQUIRE(hist.size() == 4);
        for (const auto& [type, n] : hist) {
            CHECK(n >= 40);
            CHECK(n <= 60);
            CHECK(n == 50);
        }
        CHECK(synth_omission_types().size() == 4);
    }

    TEST_CASE("synthetic splits are id-disjoint for 50 seeds") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto s = synth_corpus(seed, 40, 40, 20);
            std::set<std::string> ids;
            std::set<std::string> blocks;
            std::size_t n = 0;
            for (auto role : {SplitRole::candidates, SplitRole::train, SplitRole::dev}) {
                for (const auto& c : s.role(role)) {
                    ids.insert(c.id);
                    std::string key = c.incomplete;
                    for (const auto& t : c.context) key += "\n" + t;
                    blocks.insert(key);
                    ++n;
                }
            }
            CHECK(ids.size() == n);
            CHECK(blocks.size() == n);
            CHECK_NOTHROW(validate_split(s));
        }
    }
}

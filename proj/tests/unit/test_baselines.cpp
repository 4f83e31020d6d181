#include "criteria.hpp"
#include "demosel/baselines.hpp"
#include "demosel/error.hpp"

#include <doctest.h>

#include <fstream>
#include <set>

using namespace demosel;

namespace {

DialogueCase doc(std::string id, std::string text) {
    DialogueCase c;
    c.id = std::move(id);
    c.incomplete = std::move(text);
    c.rewrite = c.incomplete;
    return c;
}

}  // namespace

TEST_SUITE("baselines") {
    TEST_CASE("bm25 on a two-document corpus") {
        // avg length 2.5; norms k1 (1 - b + b |d| / avg) are 1.275 and 1.725
        const std::vector<DialogueCase> docs = {doc("d1", "cheap food"), doc("d2", "cheap hotel north")};
        Bm25Index index(docs, {});
        CHECK(index.avg_len() == 2.5);
        CHECK(index.idf("food") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(index.idf("cheap") == doctest::Approx(std::log(1.2)).epsilon(1e-12));

        const auto food = index.scores({"food"});
        CHECK(food[0] == doctest::Approx(std::log(2.0) * 2.5 / 2.275).epsilon(1e-12));
        CHECK(food[0] == doctest::Approx(0.7617004).epsilon(1e-6));
        CHECK(food[1] == 0.0);
        const auto cheap = index.scores({"cheap"});
        CHECK(cheap[0] == doctest::Approx(std::log(1.2) * 2.5 / 2.275).epsilon(1e-12));
        CHECK(cheap[1] == doctest::Approx(std::log(1.2) * 2.5 / 2.725).epsilon(1e-12));
        // repeated query terms count once per occurrence
        CHECK(index.scores({"food", "food"})[0] == doctest::Approx(2 * food[0]));

        CHECK(bm25_select(index, doc("q", "north hotel"), 2) == std::vector<std::string>{"d2", "d1"});
        CHECK(bm25_select(index, doc("q", "cheap"), 1) == std::vector<std::string>{"d1"});
        // no overlap at all: ties everywhere, smaller id first
        CHECK(bm25_select(index, doc("q", "zebra"), 2) == std::vector<std::string>{"d1", "d2"});
    }

    TEST_CASE("bm25 indexes the context too") {
        auto a = doc("a", "yes");
        a.context = {"an italian place"};
        const std::vector<DialogueCase> docs = {a, doc("b", "no thanks")};
        Bm25Index index(docs, {});
        auto q = doc("q", "anything");
        q.context = {"italian please"};
        CHECK(index.query_tokens(q) == Tokens{"italian", "please", "anything"});
        CHECK(bm25_select(index, q, 1) == std::vector<std::string>{"a"});
    }

    TEST_CASE("token map folds variants before scoring") {
        fixtures::TempDir dir("tokmap");
        std::ofstream(dir / "map.tsv") << "foods\tfood\nhotels\thotel\n";
        const auto map = load_token_map(dir / "map.tsv");
        CHECK(map.at("foods") == "food");
        const std::vector<DialogueCase> docs = {doc("a", "hotels"), doc("b", "food")};
        Bm25Index plain(docs, {});
        Bm25Index mapped(docs, {}, TokenizeMode::word, map);
        CHECK(plain.scores(plain.query_tokens(doc("q", "foods")))[1] == 0.0);
        CHECK(mapped.scores(mapped.query_tokens(doc("q", "foods")))[1] > 0.0);
        CHECK(bm25_select(mapped, doc("q", "hotel"), 1) == std::vector<std::string>{"a"});
        std::ofstream(dir / "bad.tsv") << "no tab here\n";
        CHECK_THROWS_AS(load_token_map(dir / "bad.tsv"), InputError);
        CHECK_THROWS_AS(load_token_map(dir / "missing.tsv"), InputError);
    }

    TEST_CASE("bm25 and knn rankings agree with brute force") {
        const auto r = criteria::ranking_check(100, 42);
        CHECK(r.bm25_mismatches == 0);
        CHECK(r.knn_mismatches == 0);
        CHECK(r.bm25_ties > 0);
        CHECK(r.knn_ties > 0);
    }

    TEST_CASE("knn uses signed cosine") {
        EmbeddingTable t(2);
        t.insert("anti", Eigen::Vector2d(-1.0, 0.0));
        t.insert("side", Eigen::Vector2d(0.2, 1.0));
        t.insert("q", Eigen::Vector2d(1.0, 0.0));
        const std::vector<std::string> cands = {"anti", "side"};
        CHECK(knn_select(t, cands, "q", 2) == std::vector<std::string>{"side", "anti"});
        CHECK_THROWS_AS(knn_select(t, cands, "q", 3), InputError);
    }

    TEST_CASE("top-k ordering") {
        const std::vector<double> s = {0.5, 0.9, 0.5, 0.1};
        const std::vector<std::string> ids = {"c", "b", "a", "d"};
        CHECK(top_k_by_score(s, ids, 4) == std::vector<std::size_t>{1, 2, 0, 3});
        CHECK(top_k_by_score(s, ids, 0).empty());
    }

    TEST_CASE("random selection") {
        const auto split = synth_corpus(0, 30, 5, 5);
        const auto cands = ids_of(split.candidates);
        RandomSelector a(cands, 1), b(cands, 1), c(cands, 2);
        const auto& t = split.dev[0];
        const auto sel = a.select(t, 5);
        CHECK(sel == b.select(t, 5));
        CHECK(sel != c.select(t, 5));
        CHECK(std::set<std::string>(sel.begin(), sel.end()).size() == 5);
        CHECK(a.select(split.dev[1], 5) != sel);
        CHECK(a.select(t, 30).size() == 30);
        CHECK_THROWS_AS(a.select(t, 31), InputError);

        // each candidate shows up about equally often as the first draw
        std::vector<int> first(cands.size());
        Rng rng(0);
        for (int i = 0; i < 30000; ++i) {
            const auto s = select_random(cands, 2, rng);
            ++first[std::size_t(std::find(cands.begin(), cands.end(), s[0]) - cands.begin())];
        }
        for (int n : first) CHECK(std::abs(n - 1000) < 150);
    }

    TEST_CASE("selection files") {
        fixtures::TempDir dir("sel");
        const SelectionMap m = {{"t1", {"a", "b", "c"}}, {"t2", {"c", "a", "b"}}};
        save_selections(dir / "s.jsonl", m);
        const auto back = load_selections(dir / "s.jsonl");
        CHECK(back == m);
        FileSelector sel(back, "external");
        CHECK(sel.label() == "external");
        CHECK(sel.select(doc("t2", "x"), 2) == std::vector<std::string>{"c", "a"});
        try {
            sel.select(doc("t9", "x"), 2);
            FAIL("expected an error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("'t9'") != std::string::npos);
        }
        CHECK_THROWS_AS(sel.select(doc("t1", "x"), 4), InputError);

        std::ofstream(dir / "bad.jsonl") << R"({"test_id":"t1"})" << '\n';
        CHECK_THROWS_AS(load_selections(dir / "bad.jsonl"), InputError);
        CHECK_THROWS_AS(load_selections(dir / "none.jsonl"), InputError);
    }

    TEST_CASE("policy selector decodes greedily") {
        const auto split = synth_corpus(1, 20, 2, 3);
        const auto table = hash_table(split, 64, 0);
        const auto cands = ids_of(split.candidates);
        PolicySelector p(PolicyParams::identity(64), table, cands);
        const auto& t = split.dev[0];
        CHECK(p.select(t, 4) == argmax_demonstration(PolicyParams::identity(64), table, cands, t.id, 4).selected);
        CHECK(p.label() == "Ours");
        CHECK_THROWS_AS(PolicySelector(PolicyParams::identity(32), table, cands), InputError);
    }
}

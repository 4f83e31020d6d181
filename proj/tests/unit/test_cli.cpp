#include "criteria.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>

using criteria::cli;
using criteria::slurp;

namespace {

struct Data {
    fixtures::TempDir dir{"cli"};
    std::vector<std::string> corpus;

    Data() {
        const auto d = dir.path().string();
        REQUIRE(cli({"synth", "--seed", "3", "--candidates", "40", "--train", "20", "--dev", "12", "--out-dir", d}) == 0);
        corpus = {"--corpus", "candidates=" + d + "/candidates.jsonl", "--corpus", "train=" + d + "/train.jsonl",
                  "--corpus", "dev=" + d + "/dev.jsonl"};
    }

    std::vector<std::string> args(std::vector<std::string> head, const std::vector<std::string>& tail = {}) const {
        head.insert(head.end(), corpus.begin(), corpus.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::vector<std::string> table_rows(const std::string& table) {
    std::vector<std::string> rows;
    std::istringstream in(table);
    std::string line;
    for (int i = 0; std::getline(in, line); ++i) {
        if (i >= 2) rows.push_back(line);
    }
    return rows;
}

nlohmann::json error_json(const std::string& err) {
    REQUIRE(!err.empty());
    REQUIRE(err.find('\n') == err.size() - 1);
    return nlohmann::json::parse(err);
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("synth writes the three splits") {
        Data data;
        CHECK(demosel::load_corpus(data.path("candidates.jsonl"), demosel::SplitRole::candidates).size() == 40);
        CHECK(demosel::load_corpus(data.path("dev.jsonl"), demosel::SplitRole::dev).size() == 12);
    }

    TEST_CASE("usage errors exit 2 with a json line") {
        std::string err;
        CHECK(cli({"bogus"}, nullptr, &err) == 2);
        CHECK(error_json(err)["error"] == "usage");
        CHECK(cli({}, nullptr, &err) == 2);
        CHECK(cli({"evaluate", "--selector", "random"}, nullptr, &err) == 2);
        CHECK(cli({"train", "--corpus", "nonsense"}, nullptr, &err) == 2);
        CHECK(cli({"evaluate", "--selector", "knn", "--vectors", "v", "--hash-dim", "16"}, nullptr, &err) == 2);
        Data data;
        CHECK(cli(data.args({"evaluate", "--selector", "magic"}), nullptr, &err) == 2);
        CHECK(error_json(err)["error"] == "input");
        CHECK(cli(data.args({"evaluate", "--selector", "policy"}), nullptr, &err) == 2);
        CHECK(cli(data.args({"evaluate", "--selector", "random", "--shots", "41"}), nullptr, &err) == 2);
        CHECK(cli(data.args({"train", "--lr", "0", "--out-dir", data.path("t")}), nullptr, &err) == 2);
        CHECK(cli(data.args({"evaluate", "--selector", "random", "--corpus", "dev=x"}), nullptr, &err) == 2);
    }

    TEST_CASE("missing vectors file is an input error naming the path") {
        Data data;
        std::string err;
        const auto missing = data.path("no-such-vectors.jsonl");
        CHECK(cli(data.args({"evaluate", "--selector", "knn", "--vectors", missing}), nullptr, &err) == 2);
        const auto j = error_json(err);
        CHECK(j["error"] == "input");
        CHECK(j["message"].get<std::string>().find(missing) != std::string::npos);
    }

    TEST_CASE("vectors file drives knn") {
        Data data;
        const auto split = [&] {
            demosel::CorpusSplit s;
            s.candidates = demosel::load_corpus(data.path("candidates.jsonl"), demosel::SplitRole::candidates);
            s.train = demosel::load_corpus(data.path("train.jsonl"), demosel::SplitRole::train);
            s.dev = demosel::load_corpus(data.path("dev.jsonl"), demosel::SplitRole::dev);
            return s;
        }();
        demosel::save_vectors(data.path("v.jsonl"), demosel::hash_table(split, 48, 0));
        std::string from_file, hashed;
        CHECK(cli(data.args({"evaluate", "--selector", "knn", "--vectors", data.path("v.jsonl")}), &from_file) == 0);
        CHECK(cli(data.args({"evaluate", "--selector", "knn", "--hash-dim", "48"}), &hashed) == 0);
        CHECK(from_file == hashed);
    }

    TEST_CASE("manifest records input hashes") {
        Data data;
        CHECK(cli(data.args({"evaluate", "--selector", "random", "--out-dir", data.path("a")})) == 0);
        const auto m1 = nlohmann::json::parse(slurp(data.dir / "a/manifest.json"));
        CHECK(m1["command"] == "evaluate");
        CHECK(m1["config"]["selector"][0] == "random");
        const auto h1 = m1["inputs"]["dev"]["sha256"].get<std::string>();
        CHECK(h1.size() == 64);

        auto text = slurp(data.dir / "dev.jsonl");
        const auto pos = text.find("\"incomplete\":\"") + 14;
        text[pos] = text[pos] == 'x' ? 'y' : 'x';
        std::ofstream(data.path("dev.jsonl"), std::ios::binary) << text;
        CHECK(cli(data.args({"evaluate", "--selector", "random", "--out-dir", data.path("b")})) == 0);
        const auto m2 = nlohmann::json::parse(slurp(data.dir / "b/manifest.json"));
        CHECK(m2["inputs"]["dev"]["sha256"] != h1);
        CHECK(m2["inputs"]["candidates"]["sha256"] == m1["inputs"]["candidates"]["sha256"]);
    }

    TEST_CASE("random baseline depends on the seed") {
        Data data;
        std::string s1, s1b, s2;
        CHECK(cli(data.args({"evaluate", "--selector", "random", "--seed", "1"}), &s1) == 0);
        CHECK(cli(data.args({"evaluate", "--selector", "random", "--seed", "1"}), &s1b) == 0);
        CHECK(cli(data.args({"evaluate", "--selector", "random", "--seed", "2"}), &s2) == 0);
        CHECK(s1 == s1b);
        CHECK(table_rows(s1) != table_rows(s2));
    }

    TEST_CASE("compare prints one row per selector with evaluate's numbers") {
        Data data;
        std::string cmp, bm25, knn, random;
        CHECK(cli(data.args({"compare", "--selector", "random", "--selector", "bm25", "--selector", "knn", "--out-dir",
                             data.path("cmp")}),
                  &cmp) == 0);
        const auto rows = table_rows(cmp);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].rfind("Random", 0) == 0);
        CHECK(rows[1].rfind("BM25", 0) == 0);
        CHECK(rows[2].rfind("KATE", 0) == 0);
        CHECK(cli(data.args({"evaluate", "--selector", "random"}), &random) == 0);
        CHECK(cli(data.args({"evaluate", "--selector", "bm25"}), &bm25) == 0);
        CHECK(cli(data.args({"evaluate", "--selector", "knn"}), &knn) == 0);
        // label column width follows the longest label, so compare the numbers
        auto numbers = [](const std::string& row) { return row.substr(row.find('|')); };
        CHECK(numbers(table_rows(random)[0]) == numbers(rows[0]));
        CHECK(numbers(table_rows(bm25)[0]) == numbers(rows[1]));
        CHECK(numbers(table_rows(knn)[0]) == numbers(rows[2]));
        CHECK(std::filesystem::exists(data.dir / "cmp/selections-3.jsonl"));
        std::ifstream metrics(data.path("cmp/metrics.jsonl"));
        std::string line;
        int n = 0;
        while (std::getline(metrics, line)) ++n;
        CHECK(n == 3);
    }

    TEST_CASE("a selections file replays an evaluation") {
        Data data;
        std::string first, replay, err;
        CHECK(cli(data.args({"evaluate", "--selector", "bm25", "--out-dir", data.path("e")}), &first) == 0);
        CHECK(cli(data.args({"evaluate", "--selector", "file:" + data.path("e/selections.jsonl")}), &replay) == 0);
        const auto a = table_rows(first)[0], b = table_rows(replay)[0];
        CHECK(a.substr(a.find('|')) == b.substr(b.find('|')));
        CHECK(b.rfind("selections", 0) == 0);
        std::ofstream(data.path("partial.jsonl")) << R"({"test_id":"nope","demo_ids":["a"]})" << '\n';
        CHECK(cli(data.args({"evaluate", "--selector", "file:" + data.path("partial.jsonl")}), nullptr, &err) == 2);
    }

    TEST_CASE("train then evaluate, then resume from the manifest config") {
        Data data;
        std::string out;
        CHECK(cli(data.args({"train", "--epochs", "2", "--shots", "3", "--out-dir", data.path("t")}), &out) == 0);
        CHECK(out.find("epoch 1") != std::string::npos);
        CHECK(out.find("best dev rougeL") != std::string::npos);
        const auto manifest = nlohmann::json::parse(slurp(data.dir / "t/manifest.json"));
        CHECK(manifest["config"]["shots"] == 3);
        CHECK(manifest["result"]["checkpoint_sha256"].get<std::string>().size() == 64);
        CHECK(!manifest["config"].contains("out-dir"));

        std::string eval;
        CHECK(cli(data.args({"evaluate", "--selector", "policy", "--shots", "3", "--checkpoint", data.path("t/checkpoint.json")}),
                  &eval) == 0);
        CHECK(table_rows(eval)[0].rfind("Ours", 0) == 0);

        std::string err;
        CHECK(cli(data.args({"evaluate", "--selector", "policy", "--hash-dim", "64", "--checkpoint",
                             data.path("t/checkpoint.json")}),
                  nullptr, &err) == 2);
    }

    TEST_CASE("analyze reports complexity per selector") {
        Data data;
        std::string out;
        CHECK(cli(data.args({"analyze", "--selector", "random", "--selector", "length"}), &out) == 0);
        CHECK(out.find("Incomplete") != std::string::npos);
        CHECK(out.find("Length") != std::string::npos);
        CHECK(out.find("Random") != std::string::npos);
    }

    TEST_CASE("identical runs produce identical files") {
        const auto r = criteria::determinism_check(2);
        CHECK(r.train_ok);
        CHECK(r.evaluate_ok);
        for (const auto& d : r.differing) MESSAGE("differs: " << d);
    }
}

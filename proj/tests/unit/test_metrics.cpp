#include "demosel/error.hpp"
#include "demosel/metrics.hpp"
#include "metric_oracle.hpp"

#include <doctest.h>

#include <random>

using namespace demosel;

namespace {

Tokens words(std::string_view s) { return tokenize(s); }

Tokens random_tokens(std::mt19937_64& g, std::size_t max_len) {
    static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f", "g"};
    std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, vocab.size() - 1);
    Tokens out(len(g));
    for (auto& t : out) t = vocab[pick(g)];
    return out;
}

}  // namespace

TEST_SUITE("metrics") {
    TEST_CASE("rouge-1 of a truncated rewrite") {
        const Tokens hyp = {"how", "about", "mediterranean", "food"};
        const Tokens ref = {"how", "about", "mediterranean", "food", "in", "expensive", "price", "range"};
        // P = 4/4, R = 4/8
        CHECK(rouge_n(hyp, ref, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(rouge_l(hyp, ref) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(lcs_length(hyp, ref) == 4);
    }

    TEST_CASE("identity and degenerate inputs") {
        const Tokens s = {"x", "y", "z", "x"};
        CHECK(rouge_n(s, s, 1) == 1.0);
        CHECK(rouge_n(s, s, 2) == 1.0);
        CHECK(rouge_l(s, s) == 1.0);
        for (int n = 1; n <= 4; ++n) CHECK(bleu_n(s, s, n) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(rouge_n({}, s, 1) == 0.0);
        CHECK(rouge_l({}, s) == 0.0);
        CHECK(bleu_n({}, s, 4) == 0.0);
        CHECK(rouge_l({"p", "q"}, {"r", "s"}) == 0.0);
        CHECK(rouge_n({"p"}, {"p"}, 2) == 0.0);
    }

    TEST_CASE("bleu-1 with one wrong token") {
        CHECK(bleu_n({"a", "b", "c"}, {"a", "b", "d"}, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }

    TEST_CASE("bleu smoothing and brevity") {
        // unigram 2/2, bigram 0 matches of 1 -> 1/2, BP exp(1 - 4/2)
        const double expected = std::exp(1.0 - 2.0) * std::sqrt(1.0 * 0.5);
        CHECK(bleu_n({"a", "c"}, {"a", "b", "c", "d"}, 2) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(bleu_n({"q"}, {"a"}, 3) == 0.0);
        CHECK_THROWS_AS(bleu_n({"a"}, {"a"}, 0), Error);
        CHECK_THROWS_AS(bleu_n({"a"}, {"a"}, 5), Error);
    }

    TEST_CASE("restoration f-score") {
        const auto incomplete = words("how about mediterranean food");
        const auto ref = words("how about mediterranean food in expensive price range");
        CHECK(restoration_fscore(ref, ref, incomplete, 1) == 1.0);
        const auto hyp = words("how about mediterranean food in cheap price range");
        CHECK(restored_tokens(hyp, incomplete) == Tokens{"in", "cheap", "price", "range"});
        CHECK(restoration_fscore(hyp, ref, incomplete, 1) == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(restoration_fscore(incomplete, ref, incomplete, 1) == 0.0);
        CHECK(restoration_fscore(incomplete, incomplete, incomplete, 2) == 1.0);
        CHECK(restoration_fscore(ref, incomplete, incomplete, 1) == 0.0);
    }

    TEST_CASE("restored tokens are a multiset difference") {
        CHECK(restored_tokens({"a", "b", "a", "c"}, {"a"}) == Tokens{"b", "a", "c"});
        CHECK(restored_tokens({"a", "b"}, {"a", "a", "b"}).empty());
    }

    TEST_CASE("score_pair composes the individual metrics") {
        const std::string hyp = "How about Mediterranean food in cheap price range?";
        const std::string ref = "How about Mediterranean food in expensive price range?";
        const std::string inc = "How about Mediterranean food?";
        const auto r = score_pair(hyp, ref, inc);
        const auto h = words(hyp), g = words(ref), i = words(inc);
        CHECK(r.rouge1 == rouge_n(h, g, 1));
        CHECK(r.rouge2 == rouge_n(h, g, 2));
        CHECK(r.rougeL == rouge_l(h, g));
        for (int n = 1; n <= 4; ++n) CHECK(r.bleu[n - 1] == bleu_n(h, g, n));
        for (int n = 1; n <= 3; ++n) CHECK(r.fscore[n - 1] == restoration_fscore(h, g, i, n));

        const auto same = score_pair(ref, ref, inc);
        CHECK(same.rougeL == 1.0);
        CHECK(same.fscore[2] == 1.0);
        CHECK(same.bleu[3] == doctest::Approx(1.0));
        CHECK_THROWS_AS(score_pair("x", "  ", "y"), InputError);
    }

    TEST_CASE("agrees with the definitional oracle on random pairs") {
        std::mt19937_64 g(7);
        for (int trial = 0; trial < 50; ++trial) {
            const auto hyp = random_tokens(g, 12);
            auto ref = random_tokens(g, 12);
            if (ref.empty()) ref = {"a"};
            const auto inc = random_tokens(g, 5);
            const auto r = score_tokens(hyp, ref, inc);
            CHECK(std::abs(r.rouge1 - oracle::rouge_n(hyp, ref, 1)) <= 1e-9);
            CHECK(std::abs(r.rouge2 - oracle::rouge_n(hyp, ref, 2)) <= 1e-9);
            CHECK(std::abs(r.rougeL - oracle::rouge_l(hyp, ref)) <= 1e-9);
            for (std::size_t n = 1; n <= 4; ++n) CHECK(std::abs(r.bleu[n - 1] - oracle::bleu(hyp, ref, n)) <= 1e-9);
            for (std::size_t n = 1; n <= 3; ++n) {
                CHECK(std::abs(r.fscore[n - 1] - oracle::fscore(hyp, ref, inc, n)) <= 1e-9);
            }
        }
    }

    TEST_CASE("bounds and structural properties") {
        std::mt19937_64 g(11);
        for (int trial = 0; trial < 300; ++trial) {
            const auto hyp = random_tokens(g, 10);
            auto ref = random_tokens(g, 10);
            if (ref.empty()) ref = {"b"};
            const auto r = score_tokens(hyp, ref, random_tokens(g, 4));
            for (double v : {r.rouge1, r.rouge2, r.rougeL, r.bleu[0], r.bleu[1], r.bleu[2], r.bleu[3], r.fscore[0],
                             r.fscore[1], r.fscore[2]}) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0 + 1e-12);
            }
            CHECK(lcs_length(hyp, ref) <= std::min(hyp.size(), ref.size()));
            CHECK((rouge_l(hyp, ref) == 1.0) == (hyp == ref));
            if (!hyp.empty()) {
                CHECK(restoration_fscore(hyp, ref, {}, 1) == rouge_n(hyp, ref, 1));
                CHECK(restoration_fscore(hyp, ref, {}, 2) == rouge_n(hyp, ref, 2));
            }
        }
    }

    TEST_CASE("replacing a matching token never raises rouge-n") {
        std::mt19937_64 g(3);
        for (int trial = 0; trial < 200; ++trial) {
            auto ref = random_tokens(g, 10);
            if (ref.size() < 2) continue;
            auto hyp = ref;
            const auto pos = std::uniform_int_distribution<std::size_t>(0, hyp.size() - 1)(g);
            const double before1 = rouge_n(hyp, ref, 1), before2 = rouge_n(hyp, ref, 2);
            hyp[pos] = "zz";
            CHECK(rouge_n(hyp, ref, 1) <= before1);
            CHECK(rouge_n(hyp, ref, 2) <= before2);
        }
    }

    TEST_CASE("bleu-1 of a prefix is the brevity penalty") {
        const Tokens ref = {"a", "b", "c", "d", "e", "f"};
        for (std::size_t len = 1; len <= ref.size(); ++len) {
            const Tokens hyp(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(len));
            const double bp = std::min(1.0, std::exp(1.0 - double(ref.size()) / double(len)));
            CHECK(bleu_n(hyp, ref, 1) == doctest::Approx(bp).epsilon(1e-12));
        }
    }

    TEST_CASE("reward metric names") {
        CHECK(parse_reward_metric("rougeL") == RewardMetric::rougeL);
        CHECK(parse_reward_metric("bleu4") == RewardMetric::bleu4);
        CHECK(to_string(RewardMetric::f1) == "f1");
        CHECK_THROWS_AS(parse_reward_metric("meteor"), InputError);
        MetricReport r;
        r.bleu[3] = 0.25;
        r.fscore[0] = 0.5;
        CHECK(pick_metric(r, RewardMetric::bleu4) == 0.25);
        CHECK(pick_metric(r, RewardMetric::f1) == 0.5);
    }
}

// One line per headline check: "PASS <name>: <detail>" or "FAIL ...".
// Exit status is the number of failures (capped at 1).

#include "criteria.hpp"

#include <cstdio>
#include <functional>
#include <iostream>

namespace {

// Tolerances and margins, fixed here rather than taken from the command line.
constexpr double kGradientRelError = 1e-4;
constexpr double kGradientSeconds = 60.0;
constexpr std::size_t kSamplingDraws = 200000;
constexpr double kSamplingTolerance = 0.01;
constexpr double kMetricTolerance = 1e-9;
constexpr double kIdentityTolerance = 1e-10;
constexpr double kRandomMargin = 0.05;
constexpr double kKnnMargin = 0.01;
constexpr double kClosedLoopSeconds = 300.0;
constexpr double kOrderTolerance = 1e-9;

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome gradient() {
    const auto r = criteria::gradient_check(20, 16, 10, 3, 2024);
    return {r.worst_rel_error <= kGradientRelError && r.seconds < kGradientSeconds,
            fmt("worst relative error %.3e (limit %.0e), %.2f s (limit %.0f s)", r.worst_rel_error, kGradientRelError,
                r.seconds, kGradientSeconds)};
}

Outcome sampling() {
    const auto r = criteria::sampling_check(kSamplingDraws, 7);
    return {r.max_abs_dev <= kSamplingTolerance && r.pairs_seen == 12,
            fmt("max |freq - p| %.5f over %zu ordered pairs, %zu draws (limit %.2f)", r.max_abs_dev, r.pairs_seen,
                kSamplingDraws, kSamplingTolerance)};
}

Outcome metrics() {
    const auto r = criteria::metric_check(50, 99);
    const bool fixtures = std::abs(r.rouge_l_fixture - 2.0 / 3.0) <= 1e-12 && std::abs(r.restoration_fixture - 0.75) <= 1e-12;
    return {r.max_abs_diff <= kMetricTolerance && fixtures,
            fmt("max |lib - oracle| %.3e on 50 pairs; ROUGE-L fixture %.4f, restoration F1 fixture %.4f",
                r.max_abs_diff, r.rouge_l_fixture, r.restoration_fixture)};
}

Outcome rankings() {
    const auto r = criteria::ranking_check(100, 31337);
    return {r.bm25_mismatches == 0 && r.knn_mismatches == 0 && r.bm25_ties > 0 && r.knn_ties > 0,
            fmt("BM25 mismatches %zu/100, kNN mismatches %zu/100; corpora with ties: BM25 %zu, kNN %zu",
                r.bm25_mismatches, r.knn_mismatches, r.bm25_ties, r.knn_ties)};
}

Outcome baseline_identity() {
    const auto r = criteria::baseline_identity_check(11);
    return {r.records > 0 && r.max_advantage_error == 0.0 && r.max_gradient_error <= kIdentityTolerance,
            fmt("%zu records in %zu batches; advantage error %.1e, gradient error %.3e (limit %.0e)", r.records,
                r.batches, r.max_advantage_error, r.max_gradient_error, kIdentityTolerance)};
}

Outcome closed_loop() {
    const auto r = criteria::closed_loop_check(0);
    const double vs_random = r.policy_rouge_l - r.random_rouge_l;
    const double vs_knn = r.policy_rouge_l - std::max(r.knn_rouge_l, r.identity_rouge_l);
    return {vs_random >= kRandomMargin && vs_knn >= kKnnMargin && r.seconds <= kClosedLoopSeconds,
            fmt("dev ROUGE-L trained %.4f, random %.4f (+%.4f, need %.2f), kNN %.4f, identity-W %.4f (+%.4f, need "
                "%.2f); best epoch %zu of %zu, %.1f s",
                r.policy_rouge_l, r.random_rouge_l, vs_random, kRandomMargin, r.knn_rouge_l, r.identity_rouge_l, vs_knn,
                kKnnMargin, r.best_epoch, r.epochs_run, r.seconds)};
}

Outcome determinism() {
    const auto r = criteria::determinism_check(3);
    std::string detail = r.train_ok && r.evaluate_ok ? "train and evaluate outputs byte-identical across runs"
                                                     : "differences:";
    for (const auto& d : r.differing) detail += " [" + d + "]";
    return {r.train_ok && r.evaluate_ok, detail};
}

Outcome order_robustness() {
    const auto r = criteria::order_check(0);
    return {r.max_abs_diff < kOrderTolerance && r.prompts_differing > 0,
            fmt("max |ROUGE-L sampling - reverse| %.3e (limit %.0e); %zu of %zu prompts differ", r.max_abs_diff,
                kOrderTolerance, r.prompts_differing, r.episodes)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
        {"gradient-correctness", gradient},     {"sampling-correctness", sampling},
        {"metric-oracle-equivalence", metrics}, {"bm25-knn-oracle-equivalence", rankings},
        {"baseline-subtraction-identity", baseline_identity},
        {"closed-loop-learning", closed_loop},  {"determinism", determinism},
        {"order-robustness", order_robustness},
    };
    int failures = 0;
    for (const auto& [name, check] : checks) {
        Outcome o{false, ""};
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
        if (!o.pass) ++failures;
    }
    std::cout << (checks.size() - std::size_t(failures)) << "/" << checks.size() << " passed" << std::endl;
    return failures == 0 ? 0 : 1;
}

#pragma once

#include "demosel/tokenize.hpp"

#include <array>
#include <string_view>

namespace demosel {

/// Sentence-level scores, all in [0, 1]. Index i of `bleu` holds BLEU-(i+1),
/// index i of `fscore` holds restoration F-(i+1).
struct MetricReport {
    std::array<double, 4> bleu{};
    double rouge1 = 0.0;
    double rouge2 = 0.0;
    double rougeL = 0.0;
    std::array<double, 3> fscore{};

    MetricReport& operator+=(const MetricReport& other);
    MetricReport scaled(double factor) const;
};

/// F1 of clipped n-gram overlap. 0 when either side has no n-grams.
double rouge_n(const Tokens& hyp, const Tokens& ref, int n);

/// Longest common subsequence length.
std::size_t lcs_length(const Tokens& a, const Tokens& b);

/// LCS-based F1.
double rouge_l(const Tokens& hyp, const Tokens& ref);

/// Sentence BLEU up to order `n` (1..4) with uniform weights. Orders above 1
/// with zero clipped matches use add-one smoothing: p_k = 1 / (count_k + 1).
double bleu_n(const Tokens& hyp, const Tokens& ref, int n);

/// Tokens of `seq` left after removing the multiset `incomplete` from it,
/// in original order.
Tokens restored_tokens(const Tokens& seq, const Tokens& incomplete);

/// n-gram F1 over the restored parts of hypothesis and reference.
/// Both restored parts empty -> 1; exactly one empty -> 0.
double restoration_fscore(const Tokens& hyp, const Tokens& ref, const Tokens& incomplete, int n);

MetricReport score_tokens(const Tokens& hyp, const Tokens& ref, const Tokens& incomplete);

/// Tokenizes all three strings with `mode` and fills every field.
/// Throws InputError on an empty reference.
MetricReport score_pair(std::string_view hyp, std::string_view ref, std::string_view incomplete,
                        TokenizeMode mode = TokenizeMode::word);

enum class RewardMetric { rougeL, rouge1, bleu4, f1 };

RewardMetric parse_reward_metric(std::string_view name);
std::string_view to_string(RewardMetric metric);
double pick_metric(const MetricReport& report, RewardMetric metric);

}  // namespace demosel

#include "demosel/metrics.hpp"

#include "demosel/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

namespace demosel {
namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const Tokens& seq, int n) {
    NgramCounts counts;
    if (n <= 0 || seq.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
        ++counts[std::vector<std::string>(seq.begin() + i, seq.begin() + i + n)];
    }
    return counts;
}

std::size_t ngram_total(const Tokens& seq, int n) {
    return seq.size() >= static_cast<std::size_t>(n) ? seq.size() - n + 1 : 0;
}

std::size_t clipped_matches(const NgramCounts& hyp, const NgramCounts& ref) {
    std::size_t matches = 0;
    for (const auto& [gram, count] : hyp) {
        if (auto it = ref.find(gram); it != ref.end()) matches += std::min(count, it->second);
    }
    return matches;
}

double f1(double precision, double recall) {
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

MetricReport& MetricReport::operator+=(const MetricReport& other) {
    for (std::size_t i = 0; i < bleu.size(); ++i) bleu[i] += other.bleu[i];
    rouge1 += other.rouge1;
    rouge2 += other.rouge2;
    rougeL += other.rougeL;
    for (std::size_t i = 0; i < fscore.size(); ++i) fscore[i] += other.fscore[i];
    return *this;
}

MetricReport MetricReport::scaled(double factor) const {
    MetricReport out = *this;
    for (auto& b : out.bleu) b *= factor;
    out.rouge1 *= factor;
    out.rouge2 *= factor;
    out.rougeL *= factor;
    for (auto& f : out.fscore) f *= factor;
    return out;
}

double rouge_n(const Tokens& hyp, const Tokens& ref, int n) {
    const auto hyp_total = ngram_total(hyp, n);
    const auto ref_total = ngram_total(ref, n);
    if (hyp_total == 0 || ref_total == 0) return 0.0;
    const auto matches = static_cast<double>(clipped_matches(count_ngrams(hyp, n), count_ngrams(ref, n)));
    return f1(matches / static_cast<double>(hyp_total), matches / static_cast<double>(ref_total));
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l(const Tokens& hyp, const Tokens& ref) {
    if (hyp.empty() || ref.empty()) return 0.0;
    const auto lcs = static_cast<double>(lcs_length(hyp, ref));
    return f1(lcs / static_cast<double>(hyp.size()), lcs / static_cast<double>(ref.size()));
}

double bleu_n(const Tokens& hyp, const Tokens& ref, int n) {
    if (n < 1 || n > 4) throw Error("bleu order must be in 1..4, got " + std::to_string(n));
    if (hyp.empty()) return 0.0;
    double log_sum = 0.0;
    for (int k = 1; k <= n; ++k) {
        const auto total = ngram_total(hyp, k);
        const auto matches = total ? clipped_matches(count_ngrams(hyp, k), count_ngrams(ref, k)) : 0;
        double precision;
        if (matches > 0) {
            precision = static_cast<double>(matches) / static_cast<double>(total);
        } else if (k > 1) {
            precision = 1.0 / static_cast<double>(total + 1);
        } else {
            return 0.0;
        }
        log_sum += std::log(precision);
    }
    const double brevity =
        std::min(1.0, std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size())));
    return brevity * std::exp(log_sum / n);
}

Tokens restored_tokens(const Tokens& seq, const Tokens& incomplete) {
    std::unordered_map<std::string, std::size_t> remaining;
    for (const auto& t : incomplete) ++remaining[t];
    Tokens out;
    for (const auto& t : seq) {
        auto it = remaining.find(t);
        if (it != remaining.end() && it->second > 0) {
            --it->second;
        } else {
            out.push_back(t);
        }
    }
    return out;
}

double restoration_fscore(const Tokens& hyp, const Tokens& ref, const Tokens& incomplete, int n) {
    const auto hyp_restored = restored_tokens(hyp, incomplete);
    const auto ref_restored = restored_tokens(ref, incomplete);
    if (hyp_restored.empty() && ref_restored.empty()) return 1.0;
    if (hyp_restored.empty() || ref_restored.empty()) return 0.0;
    return rouge_n(hyp_restored, ref_restored, n);
}

MetricReport score_tokens(const Tokens& hyp, const Tokens& ref, const Tokens& incomplete) {
    MetricReport r;
    for (int k = 1; k <= 4; ++k) r.bleu[k - 1] = bleu_n(hyp, ref, k);
    r.rouge1 = rouge_n(hyp, ref, 1);
    r.rouge2 = rouge_n(hyp, ref, 2);
    r.rougeL = rouge_l(hyp, ref);
    for (int k = 1; k <= 3; ++k) r.fscore[k - 1] = restoration_fscore(hyp, ref, incomplete, k);
    return r;
}

MetricReport score_pair(std::string_view hyp, std::string_view ref, std::string_view incomplete, TokenizeMode mode) {
    auto ref_tokens = tokenize(ref, mode);
    if (ref_tokens.empty()) throw InputError("empty reference");
    return score_tokens(tokenize(hyp, mode), ref_tokens, tokenize(incomplete, mode));
}

RewardMetric parse_reward_metric(std::string_view name) {
    if (name == "rougeL" || name == "rougel") return RewardMetric::rougeL;
    if (name == "rouge1") return RewardMetric::rouge1;
    if (name == "bleu4") return RewardMetric::bleu4;
    if (name == "f1") return RewardMetric::f1;
    throw InputError("unknown reward metric '" + std::string(name) + "' (expected rougeL|rouge1|bleu4|f1)");
}

std::string_view to_string(RewardMetric metric) {
    switch (metric) {
        case RewardMetric::rougeL: return "rougeL";
        case RewardMetric::rouge1: return "rouge1";
        case RewardMetric::bleu4: return "bleu4";
        case RewardMetric::f1: return "f1";
    }
    return "?";
}

double pick_metric(const MetricReport& report, RewardMetric metric) {
    switch (metric) {
        case RewardMetric::rougeL: return report.rougeL;
        case RewardMetric::rouge1: return report.rouge1;
        case RewardMetric::bleu4: return report.bleu[3];
        case RewardMetric::f1: return report.fscore[0];
    }
    return 0.0;
}

}  // namespace demosel

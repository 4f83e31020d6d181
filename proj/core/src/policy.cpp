#include "demosel/policy.hpp"

#include "demosel/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace demosel {
namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Eigen::VectorXd unit(const Eigen::VectorXd& v, const char* what) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(std::string(what) + " vector has zero or non-finite norm");
    return v / n;
}

void check_k(std::size_t k, const CandidatePool& pool) {
    if (k > pool.size()) {
        throw InputError("cannot select " + std::to_string(k) + " examples from " + std::to_string(pool.size()) +
                    " candidates");
    }
}

void check_dims(const PolicyParams& params, const CandidatePool& pool, const Eigen::VectorXd& test) {
    if (params.W.rows() != params.W.cols() || params.W.rows() != test.size() ||
        (pool.size() > 0 && pool.unit_rows().cols() != test.size())) {
        throw Error("dimension mismatch between W, candidates and test vector");
    }
}

// Per-step distribution over the still-available candidates.
struct StepDistribution {
    std::vector<std::size_t> remaining;
    std::vector<double> probs;
    std::vector<double> logps;
};

StepDistribution step_distribution(const Eigen::VectorXd& abs_scores, const std::vector<bool>& taken) {
    StepDistribution d;
    double max_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < abs_scores.size(); ++j) {
        if (taken[static_cast<std::size_t>(j)]) continue;
        d.remaining.push_back(static_cast<std::size_t>(j));
        max_score = std::max(max_score, abs_scores[j]);
    }
    double z = 0.0;
    for (auto j : d.remaining) z += std::exp(abs_scores[static_cast<Eigen::Index>(j)] - max_score);
    const double log_z = std::log(z) + max_score;
    d.probs.reserve(d.remaining.size());
    d.logps.reserve(d.remaining.size());
    for (auto j : d.remaining) {
        const double lp = abs_scores[static_cast<Eigen::Index>(j)] - log_z;
        d.logps.push_back(lp);
        d.probs.push_back(std::exp(lp));
    }
    return d;
}

std::vector<std::size_t> resolve(const CandidatePool& pool, std::span<const std::string> selected) {
    std::vector<std::size_t> idx;
    std::vector<bool> seen(pool.size(), false);
    for (const auto& id : selected) {
        auto i = pool.index_of(id);
        if (!i) throw Error("selected id '" + id + "' is not a candidate");
        if (seen[*i]) throw Error("selected id '" + id + "' appears twice");
        seen[*i] = true;
        idx.push_back(*i);
    }
    return idx;
}

}  // namespace

PolicyParams PolicyParams::identity(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return PolicyParams{Eigen::MatrixXd::Identity(d, d)};
}

double score(const PolicyParams& params, const Eigen::VectorXd& cand, const Eigen::VectorXd& test) {
    if (cand.size() != test.size() || params.W.rows() != cand.size() || params.W.cols() != test.size()) {
        throw Error("dimension mismatch in score");
    }
    const double denom = cand.norm() * test.norm();
    if (!(denom > 0.0)) throw Error("score of a zero-norm vector");
    return std::abs(cand.dot(params.W * test)) / denom;
}

std::vector<double> softmax_over(std::span<const double> scores) {
    if (scores.empty()) throw Error("softmax over an empty score list");
    const double max_score = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - max_score);
        z += out[i];
    }
    for (auto& p : out) p /= z;
    return out;
}

CandidatePool::CandidatePool(const EmbeddingTable& table, std::vector<std::string> ids) : ids_(std::move(ids)) {
    unit_rows_.resize(static_cast<Eigen::Index>(ids_.size()), static_cast<Eigen::Index>(table.dim()));
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second) throw Error("duplicate candidate id '" + ids_[i] + "'");
        unit_rows_.row(static_cast<Eigen::Index>(i)) = unit(table.at(ids_[i]), "candidate").transpose();
    }
}

std::optional<std::size_t> CandidatePool::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Eigen::VectorXd CandidatePool::signed_scores(const PolicyParams& params, const Eigen::VectorXd& test) const {
    check_dims(params, *this, test);
    return unit_rows_ * (params.W * unit(test, "test"));
}

CandidatePool CandidatePool::subset(std::span<const std::string> ids) const {
    CandidatePool out;
    out.ids_.assign(ids.begin(), ids.end());
    out.unit_rows_.resize(static_cast<Eigen::Index>(ids.size()), unit_rows_.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto src = index_of(ids[i]);
        if (!src) throw Error("id '" + ids[i] + "' is not in the candidate pool");
        if (!out.index_.emplace(ids[i], i).second) throw Error("duplicate candidate id '" + ids[i] + "'");
        out.unit_rows_.row(static_cast<Eigen::Index>(i)) = unit_rows_.row(static_cast<Eigen::Index>(*src));
    }
    return out;
}

DemonstrationState sample_demonstration(const PolicyParams& params, const CandidatePool& pool,
                                        const Eigen::VectorXd& test, std::size_t k, Rng& rng) {
    check_k(k, pool);
    const Eigen::VectorXd abs_scores = pool.signed_scores(params, test).cwiseAbs();
    std::vector<bool> taken(pool.size(), false);
    DemonstrationState state;
    for (std::size_t t = 0; t < k; ++t) {
        const auto d = step_distribution(abs_scores, taken);
        const double u = rng.uniform();
        std::size_t pick = d.remaining.size() - 1;
        double cumulative = 0.0;
        for (std::size_t r = 0; r < d.remaining.size(); ++r) {
            cumulative += d.probs[r];
            if (u < cumulative) {
                pick = r;
                break;
            }
        }
        taken[d.remaining[pick]] = true;
        state.selected.push_back(pool.ids()[d.remaining[pick]]);
        state.step_logps.push_back(d.logps[pick]);
        state.total_logp += d.logps[pick];
    }
    return state;
}

DemonstrationState argmax_demonstration(const PolicyParams& params, const CandidatePool& pool,
                                        const Eigen::VectorXd& test, std::size_t k) {
    check_k(k, pool);
    const Eigen::VectorXd abs_scores = pool.signed_scores(params, test).cwiseAbs();
    std::vector<bool> taken(pool.size(), false);
    DemonstrationState state;
    for (std::size_t t = 0; t < k; ++t) {
        const auto d = step_distribution(abs_scores, taken);
        std::size_t best = 0;
        for (std::size_t r = 1; r < d.remaining.size(); ++r) {
            const double a = abs_scores[static_cast<Eigen::Index>(d.remaining[r])];
            const double b = abs_scores[static_cast<Eigen::Index>(d.remaining[best])];
            if (a > b || (a == b && pool.ids()[d.remaining[r]] < pool.ids()[d.remaining[best]])) best = r;
        }
        taken[d.remaining[best]] = true;
        state.selected.push_back(pool.ids()[d.remaining[best]]);
        state.step_logps.push_back(d.logps[best]);
        state.total_logp += d.logps[best];
    }
    return state;
}

DemonstrationState evaluate_sequence(const PolicyParams& params, const CandidatePool& pool,
                                     const Eigen::VectorXd& test, std::span<const std::string> selected) {
    const auto idx = resolve(pool, selected);
    const Eigen::VectorXd abs_scores = pool.signed_scores(params, test).cwiseAbs();
    std::vector<bool> taken(pool.size(), false);
    DemonstrationState state;
    for (auto chosen : idx) {
        const auto d = step_distribution(abs_scores, taken);
        const auto r = static_cast<std::size_t>(
            std::find(d.remaining.begin(), d.remaining.end(), chosen) - d.remaining.begin());
        taken[chosen] = true;
        state.selected.push_back(pool.ids()[chosen]);
        state.step_logps.push_back(d.logps[r]);
        state.total_logp += d.logps[r];
    }
    return state;
}

Eigen::MatrixXd grad_logp(const PolicyParams& params, const CandidatePool& pool, const Eigen::VectorXd& test,
                          const DemonstrationState& state) {
    if (state.step_logps.size() != state.selected.size()) throw Error("inconsistent demonstration state");
    const auto idx = resolve(pool, state.selected);
    const Eigen::VectorXd x = unit(test, "test");
    const Eigen::VectorXd signed_scores = pool.signed_scores(params, test);
    const Eigen::VectorXd abs_scores = signed_scores.cwiseAbs();

    // d e_j / dW = sign_j * s_j x'. Every step's gradient is (row combination) x',
    // so accumulate the row combination and take one outer product.
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(pool.unit_rows().cols());
    std::vector<bool> taken(pool.size(), false);
    for (auto chosen : idx) {
        const auto d = step_distribution(abs_scores, taken);
        const auto c = static_cast<Eigen::Index>(chosen);
        direction += sign_of(signed_scores[c]) * pool.unit_rows().row(c).transpose();
        for (std::size_t r = 0; r < d.remaining.size(); ++r) {
            const auto j = static_cast<Eigen::Index>(d.remaining[r]);
            direction -= d.probs[r] * sign_of(signed_scores[j]) * pool.unit_rows().row(j).transpose();
        }
        taken[chosen] = true;
    }
    return direction * x.transpose();
}

namespace {

CandidatePool pool_for(const EmbeddingTable& table, std::span<const std::string> candidates, std::string_view test_id) {
    if (std::find(candidates.begin(), candidates.end(), test_id) != candidates.end()) {
        throw Error("test id '" + std::string(test_id) + "' is also a candidate");
    }
    return CandidatePool(table, std::vector<std::string>(candidates.begin(), candidates.end()));
}

}  // namespace

DemonstrationState sample_demonstration(const PolicyParams& params, const EmbeddingTable& table,
                                        std::span<const std::string> candidates, std::string_view test_id,
                                        std::size_t k, Rng& rng) {
    return sample_demonstration(params, pool_for(table, candidates, test_id), table.at(test_id), k, rng);
}

DemonstrationState argmax_demonstration(const PolicyParams& params, const EmbeddingTable& table,
                                        std::span<const std::string> candidates, std::string_view test_id,
                                        std::size_t k) {
    return argmax_demonstration(params, pool_for(table, candidates, test_id), table.at(test_id), k);
}

Eigen::MatrixXd grad_logp(const PolicyParams& params, const EmbeddingTable& table,
                          std::span<const std::string> candidates, std::string_view test_id,
                          const DemonstrationState& state) {
    return grad_logp(params, pool_for(table, candidates, test_id), table.at(test_id), state);
}

}  // namespace demosel

#pragma once

#include "demosel/encoder.hpp"
#include "demosel/rng.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace demosel {

/// The trainable bilinear form of the selector.
struct PolicyParams {
    Eigen::MatrixXd W;

    std::size_t dim() const { return static_cast<std::size_t>(W.rows()); }

    /// Identity W reduces scoring to plain cosine similarity.
    static PolicyParams identity(std::size_t dim);
};

/// An ordered demonstration with the log-probability of each draw.
struct DemonstrationState {
    std::vector<std::string> selected;
    std::vector<double> step_logps;
    double total_logp = 0.0;
};

/// |cand' W test| / (|cand| |test|). Throws on zero norm or dimension mismatch.
double score(const PolicyParams& params, const Eigen::VectorXd& cand, const Eigen::VectorXd& test);

/// Max-subtracted softmax. Throws on empty input.
std::vector<double> softmax_over(std::span<const double> scores);

/// Candidate vectors normalized once and stacked row-wise, so one test case
/// costs a single matrix-vector product per scoring pass.
class CandidatePool {
public:
    CandidatePool(const EmbeddingTable& table, std::vector<std::string> ids);

    const std::vector<std::string>& ids() const { return ids_; }
    std::size_t size() const { return ids_.size(); }
    const Eigen::MatrixXd& unit_rows() const { return unit_rows_; }
    std::optional<std::size_t> index_of(std::string_view id) const;

    /// s_j' W x for every candidate j, with x normalized.
    Eigen::VectorXd signed_scores(const PolicyParams& params, const Eigen::VectorXd& test) const;

    /// Sub-pool restricted to `ids` (each must belong to this pool).
    CandidatePool subset(std::span<const std::string> ids) const;

private:
    CandidatePool() = default;

    std::vector<std::string> ids_;
    Eigen::MatrixXd unit_rows_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Sequential draws without replacement; the softmax is renormalized over
/// the remaining candidates at every step.
DemonstrationState sample_demonstration(const PolicyParams& params, const CandidatePool& pool,
                                        const Eigen::VectorXd& test, std::size_t k, Rng& rng);

/// Greedy counterpart of sample_demonstration. Equal scores resolve to the
/// lexicographically smallest id.
DemonstrationState argmax_demonstration(const PolicyParams& params, const CandidatePool& pool,
                                        const Eigen::VectorXd& test, std::size_t k);

/// Log-probability of drawing `selected` in that order.
DemonstrationState evaluate_sequence(const PolicyParams& params, const CandidatePool& pool,
                                     const Eigen::VectorXd& test, std::span<const std::string> selected);

/// Gradient of total_logp with respect to W, with sign(0) taken as 0.
Eigen::MatrixXd grad_logp(const PolicyParams& params, const CandidatePool& pool, const Eigen::VectorXd& test,
                          const DemonstrationState& state);

// Table/id forms. These reject a test id that is also a candidate.
DemonstrationState sample_demonstration(const PolicyParams& params, const EmbeddingTable& table,
                                        std::span<const std::string> candidates, std::string_view test_id,
                                        std::size_t k, Rng& rng);
DemonstrationState argmax_demonstration(const PolicyParams& params, const EmbeddingTable& table,
                                        std::span<const std::string> candidates, std::string_view test_id,
                                        std::size_t k);
Eigen::MatrixXd grad_logp(const PolicyParams& params, const EmbeddingTable& table,
                          std::span<const std::string> candidates, std::string_view test_id,
                          const DemonstrationState& state);

}  // namespace demosel

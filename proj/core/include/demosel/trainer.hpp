#pragma once

#include "demosel/evaluation.hpp"
#include "demosel/metrics.hpp"
#include "demosel/policy.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace demosel {

struct TrainConfig {
    std::size_t shots = 5;
    RewardMetric reward_metric = RewardMetric::rougeL;
    std::size_t epochs = 30;
    std::size_t batch_size = 8;
    double learning_rate = 1e-3;
    std::size_t baseline_samples = 3;
    std::uint64_t seed = 0;
    std::size_t early_stop_patience = 5;
};

/// Throws InputError on zero counts or a non-positive/non-finite learning rate.
void validate(const TrainConfig& cfg);

struct RewardRecord {
    std::string case_id;
    std::vector<std::string> demo_ids;
    std::string generated;
    double reward = 0.0;
    double baseline = 0.0;
    double advantage = 0.0;  // reward - baseline
};

/// Adam-style per-coordinate step that ascends the objective.
class AdamOptimizer {
public:
    struct State {
        Eigen::MatrixXd m;
        Eigen::MatrixXd v;
        std::uint64_t step = 0;
    };

    AdamOptimizer(std::size_t dim, double learning_rate);
    AdamOptimizer(State state, double learning_rate);

    void ascend(Eigen::MatrixXd& W, const Eigen::MatrixXd& grad);

    const State& state() const { return state_; }
    double learning_rate() const { return lr_; }

    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-8;

private:
    State state_;
    double lr_;
};

struct Checkpoint {
    PolicyParams params;
    AdamOptimizer::State optimizer;
    std::size_t epoch = 0;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in, std::string_view source);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Mean reward of `samples` uniformly random k-subsets, each generated and
/// scored like a policy rollout. Seeded per (seed, case id, sample index).
double compute_baseline(const EpisodeContext& ctx, const DialogueCase& c, std::span<const std::string> candidates,
                        std::size_t k, std::size_t samples, RewardMetric metric, std::uint64_t seed);

/// Parameters used for one optimizer step, the records that produced it and
/// the accumulated sum of advantage * grad_logp (before averaging).
struct BatchTrace {
    PolicyParams snapshot;
    std::vector<RewardRecord> records;
    Eigen::MatrixXd gradient_sum;
};

struct EpochStats {
    std::size_t epoch = 0;
    double mean_reward = 0.0;
    double mean_advantage = 0.0;
    double grad_norm = 0.0;  // mean Frobenius norm of the per-batch step gradients
    std::size_t skipped = 0;
    std::optional<double> dev_metric;
};

struct EpochResult {
    EpochStats stats;
    std::vector<BatchTrace> batches;  // filled only when tracing
};

struct FitResult {
    Checkpoint best;
    std::size_t best_epoch = 0;
    double best_dev = 0.0;
    std::vector<EpochStats> history;
};

void write_history(std::ostream& out, std::span<const EpochStats> history);

/// REINFORCE with a per-case random-selection baseline. Candidates, train and
/// dev come from ctx.split.
class Trainer {
public:
    Trainer(const EpisodeContext& ctx, const EmbeddingTable& table, TrainConfig cfg);

    const TrainConfig& config() const { return cfg_; }

    /// Cached per case id; the seed is fixed for the trainer's lifetime.
    double baseline(const DialogueCase& c);

    /// One pass over the training cases in a seeded shuffled order, one
    /// optimizer step per batch. Aborts with Error if more than 10% of the
    /// cases fail to generate.
    EpochResult train_epoch(PolicyParams& params, AdamOptimizer& optimizer, std::size_t epoch, bool trace = false);

    /// Mean reward metric on the dev split under greedy decoding.
    double dev_metric(const PolicyParams& params) const;

    /// Trains from W = I, keeps the best-dev checkpoint and stops after
    /// `early_stop_patience` epochs without improvement.
    FitResult fit();

private:
    std::optional<RewardRecord> rollout(const PolicyParams& params, const DialogueCase& c, std::size_t epoch,
                                        Eigen::MatrixXd& grad_out);

    const EpisodeContext& ctx_;
    const EmbeddingTable& table_;
    TrainConfig cfg_;
    std::vector<std::string> candidate_ids_;
    CandidatePool pool_;
    std::mutex baseline_mu_;
    std::map<std::string, double> baseline_cache_;
};

}  // namespace demosel

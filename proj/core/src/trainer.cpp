#include "demosel/trainer.hpp"

#include "demosel/error.hpp"
#include "demosel/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace demosel {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, std::size_t dim, const char* what) {
    if (!j.is_array() || j.size() != dim) throw InputError(std::string("checkpoint field '") + what + "' has wrong shape");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
        if (!j[r].is_array() || j[r].size() != dim) {
            throw InputError(std::string("checkpoint field '") + what + "' has wrong shape");
        }
        for (std::size_t c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    if (!m.allFinite()) throw InputError(std::string("checkpoint field '") + what + "' is not finite");
    return m;
}

}  // namespace

void validate(const TrainConfig& cfg) {
    if (cfg.shots < 1 || cfg.epochs < 1 || cfg.batch_size < 1 || cfg.baseline_samples < 1 ||
        cfg.early_stop_patience < 1) {
        throw InputError("shots, epochs, batch size, baseline samples and patience must all be at least 1");
    }
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
        throw InputError("learning rate must be finite and positive");
    }
}

AdamOptimizer::AdamOptimizer(std::size_t dim, double learning_rate) : lr_(learning_rate) {
    const auto d = static_cast<Eigen::Index>(dim);
    state_.m = Eigen::MatrixXd::Zero(d, d);
    state_.v = Eigen::MatrixXd::Zero(d, d);
}

AdamOptimizer::AdamOptimizer(State state, double learning_rate) : state_(std::move(state)), lr_(learning_rate) {}

void AdamOptimizer::ascend(Eigen::MatrixXd& W, const Eigen::MatrixXd& grad) {
    ++state_.step;
    state_.m = beta1 * state_.m + (1.0 - beta1) * grad;
    state_.v = beta2 * state_.v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state_.step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state_.step));
    W.array() += lr_ * (state_.m.array() / c1) / ((state_.v.array() / c2).sqrt() + epsilon);
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    nlohmann::ordered_json j;
    j["dim"] = ckpt.params.dim();
    j["epoch"] = ckpt.epoch;
    j["step"] = ckpt.optimizer.step;
    j["W"] = matrix_to_json(ckpt.params.W);
    j["optimizer"] = {{"kind", "adam"},
                      {"beta1", AdamOptimizer::beta1},
                      {"beta2", AdamOptimizer::beta2},
                      {"epsilon", AdamOptimizer::epsilon},
                      {"m", matrix_to_json(ckpt.optimizer.m)},
                      {"v", matrix_to_json(ckpt.optimizer.v)}};
    out << j.dump() << '\n';
}

Checkpoint read_checkpoint(std::istream& in, std::string_view source) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(std::string(source) + ": malformed checkpoint: " + e.what());
    }
    try {
        Checkpoint c;
        const auto dim = j.at("dim").get<std::size_t>();
        if (dim == 0) throw InputError("checkpoint dimension is zero");
        c.params.W = matrix_from_json(j.at("W"), dim, "W");
        c.epoch = j.at("epoch").get<std::size_t>();
        c.optimizer.step = j.at("step").get<std::uint64_t>();
        const auto& opt = j.at("optimizer");
        c.optimizer.m = matrix_from_json(opt.at("m"), dim, "optimizer.m");
        c.optimizer.v = matrix_from_json(opt.at("v"), dim, "optimizer.v");
        return c;
    } catch (const json::exception& e) {
        throw InputError(std::string(source) + ": invalid checkpoint: " + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write checkpoint " + path.string());
    write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open checkpoint " + path.string());
    return read_checkpoint(in, path.string());
}

double compute_baseline(const EpisodeContext& ctx, const DialogueCase& c, std::span<const std::string> candidates,
                        std::size_t k, std::size_t samples, RewardMetric metric, std::uint64_t seed) {
    if (samples < 1) throw InputError("baseline needs at least one sample");
    double total = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        Rng rng(derive_seed(seed, {"baseline", c.id, std::to_string(j)}));
        const auto demos = select_random(candidates, k, rng);
        total += pick_metric(run_episode(ctx, c, demos).metrics, metric);
    }
    return total / static_cast<double>(samples);
}

void write_history(std::ostream& out, std::span<const EpochStats> history) {
    for (const auto& h : history) {
        nlohmann::ordered_json j;
        j["epoch"] = h.epoch;
        j["train_reward"] = h.mean_reward;
        j["mean_advantage"] = h.mean_advantage;
        j["dev_metric"] = h.dev_metric ? json(*h.dev_metric) : json(nullptr);
        j["grad_norm"] = h.grad_norm;
        j["skipped"] = h.skipped;
        out << j.dump() << '\n';
    }
}

Trainer::Trainer(const EpisodeContext& ctx, const EmbeddingTable& table, TrainConfig cfg)
    : ctx_(ctx),
      table_(table),
      cfg_(cfg),
      candidate_ids_(ids_of(ctx.split.candidates)),
      pool_(table, candidate_ids_) {
    validate(cfg_);
    if (cfg_.shots > candidate_ids_.size()) {
        throw InputError("shots (" + std::to_string(cfg_.shots) + ") exceeds the candidate count (" +
                         std::to_string(candidate_ids_.size()) + ")");
    }
}

double Trainer::baseline(const DialogueCase& c) {
    {
        std::lock_guard lock(baseline_mu_);
        if (auto it = baseline_cache_.find(c.id); it != baseline_cache_.end()) return it->second;
    }
    // Computed outside the lock; concurrent duplicates produce the same value.
    const double value =
        compute_baseline(ctx_, c, candidate_ids_, cfg_.shots, cfg_.baseline_samples, cfg_.reward_metric, cfg_.seed);
    std::lock_guard lock(baseline_mu_);
    return baseline_cache_.emplace(c.id, value).first->second;
}

std::optional<RewardRecord> Trainer::rollout(const PolicyParams& params, const DialogueCase& c, std::size_t epoch,
                                             Eigen::MatrixXd& grad_out) {
    Rng rng(derive_seed(cfg_.seed, {"sampling", std::to_string(epoch), c.id}));
    const auto& x = table_.at(c.id);
    const auto state = sample_demonstration(params, pool_, x, cfg_.shots, rng);
    RewardRecord rec;
    rec.case_id = c.id;
    rec.demo_ids = state.selected;
    try {
        const auto ep = run_episode(ctx_, c, state.selected);
        rec.generated = ep.generated;
        rec.reward = pick_metric(ep.metrics, cfg_.reward_metric);
        rec.baseline = baseline(c);
    } catch (const GenerationError&) {
        return std::nullopt;
    }
    rec.advantage = rec.reward - rec.baseline;
    grad_out = grad_logp(params, pool_, x, state);
    return rec;
}

EpochResult Trainer::train_epoch(PolicyParams& params, AdamOptimizer& optimizer, std::size_t epoch, bool trace) {
    const auto& train = ctx_.split.train;
    if (train.empty()) throw InputError("training split is empty");
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(cfg_.seed, {"shuffle", std::to_string(epoch)}));
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());

    EpochResult result;
    result.stats.epoch = epoch;
    double reward_sum = 0.0;
    double advantage_sum = 0.0;
    double grad_norm_sum = 0.0;
    std::size_t used = 0;
    std::size_t batches = 0;
    const auto max_skipped = train.size() / 10;

    for (std::size_t start = 0; start < order.size(); start += cfg_.batch_size) {
        const auto count = std::min(cfg_.batch_size, order.size() - start);
        // Rollouts share a frozen W; accumulation below is serial and in order.
        std::vector<std::optional<RewardRecord>> records(count);
        std::vector<Eigen::MatrixXd> grads(count);
        parallel_for(count, ctx_.jobs, [&](std::size_t i) {
            records[i] = rollout(params, train[order[start + i]], epoch, grads[i]);
        });

        const auto d = static_cast<Eigen::Index>(params.dim());
        Eigen::MatrixXd gradient_sum = Eigen::MatrixXd::Zero(d, d);
        BatchTrace batch_trace;
        if (trace) batch_trace.snapshot = params;
        std::size_t batch_used = 0;
        for (std::size_t i = 0; i < count; ++i) {
            if (!records[i]) {
                if (++result.stats.skipped > max_skipped) {
                    throw Error("generator failed on " + std::to_string(result.stats.skipped) + " of " +
                                std::to_string(train.size()) + " training cases; aborting");
                }
                continue;
            }
            gradient_sum += records[i]->advantage * grads[i];
            reward_sum += records[i]->reward;
            advantage_sum += records[i]->advantage;
            ++batch_used;
            if (trace) batch_trace.records.push_back(std::move(*records[i]));
        }
        if (batch_used == 0) continue;
        const Eigen::MatrixXd step_grad = gradient_sum / static_cast<double>(batch_used);
        grad_norm_sum += step_grad.norm();
        optimizer.ascend(params.W, step_grad);
        used += batch_used;
        ++batches;
        if (trace) {
            batch_trace.gradient_sum = std::move(gradient_sum);
            result.batches.push_back(std::move(batch_trace));
        }
    }
    if (used > 0) {
        result.stats.mean_reward = reward_sum / static_cast<double>(used);
        result.stats.mean_advantage = advantage_sum / static_cast<double>(used);
    }
    if (batches > 0) result.stats.grad_norm = grad_norm_sum / static_cast<double>(batches);
    return result;
}

double Trainer::dev_metric(const PolicyParams& params) const {
    PolicySelector selector(params, table_, candidate_ids_);
    const auto eval = evaluate_selector(ctx_, selector, ctx_.split.dev, cfg_.shots);
    return pick_metric(eval.mean, cfg_.reward_metric);
}

FitResult Trainer::fit() {
    if (ctx_.split.dev.empty()) throw InputError("dev split is empty; it controls early stopping");
    PolicyParams params = PolicyParams::identity(table_.dim());
    AdamOptimizer optimizer(table_.dim(), cfg_.learning_rate);
    FitResult fit;
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= cfg_.epochs; ++epoch) {
        auto stats = train_epoch(params, optimizer, epoch).stats;
        const double dev = dev_metric(params);
        stats.dev_metric = dev;
        fit.history.push_back(stats);
        if (epoch == 1 || dev > fit.best_dev) {
            fit.best_dev = dev;
            fit.best_epoch = epoch;
            fit.best = Checkpoint{params, optimizer.state(), epoch};
            since_best = 0;
        } else if (++since_best >= cfg_.early_stop_patience) {
            break;
        }
    }
    return fit;
}

}  // namespace demosel

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixbt/backtest.hpp"
#include "mixbt/regime.hpp"
#include "mixbt/router.hpp"
#include "mixbt/strategy.hpp"

namespace mixbt::training {

using strategy::ActionId;
using strategy::ExpertFamily;

struct RewardConfig {
    double alpha_r = 1.0;            // weight of the squashed excess return
    double alpha_s = 0.5;            // weight of the squashed Sharpe
    double beta = 0.1;               // group-reward scale
    double drawdown_penalty = 1.0;   // subtracted as penalty * MDD
    double f_cap = 1.0;              // cap of the return squashing
    double g_cap = 1.0;              // cap of the Sharpe squashing
    double c1 = 0.5;                 // value-loss coefficient
    double c2 = 0.01;                // expert entropy coefficient
    double c3 = 0.01;                // router entropy coefficient
    double gamma = 0.99;             // discount
    double clip_epsilon = 0.15;      // PPO clip

    bool valid() const { return gamma > 0.0 && gamma < 1.0 && clip_epsilon > 0.0; }
};

// f(x) = f_cap * tanh(5 x / f_cap): odd, monotone, bounded by the cap;
// g(x) = g_cap * tanh(x / (2 g_cap)).
double squash_return(double x, double cap);
double squash_sharpe(double x, double cap);

// alpha_R * f(tr_excess) + alpha_S * g(sharpe) - penalty * mdd
double base_reward(double tr_excess, double sharpe, double mdd, const RewardConfig& cfg);

double clip_objective(double ratio, double advantage, double epsilon);
double value_loss(double value, double target);
double entropy(std::span<const double> probs);

// Linear policy + value head over the router observation. Logits live on the
// union action space a1..a11 with -inf outside the expert's family, so
// cross-expert log-probabilities in the group reward are well-defined.
struct ExpertPolicy {
    ExpertFamily family = ExpertFamily::Trend;
    std::size_t obs_dim = router::kObservationDim;
    std::vector<double> weights;   // 11 x obs_dim, row-major
    std::array<double, strategy::kActionCount> bias{};
    std::vector<double> value_weights;   // obs_dim
    double value_bias = 0.0;

    static ExpertPolicy make(ExpertFamily family, std::size_t obs_dim = router::kObservationDim);

    // Probabilities over all 11 actions; masked actions are exactly 0.
    std::array<double, strategy::kActionCount> probs(const std::vector<double>& obs) const;
    double log_prob(const std::vector<double>& obs, ActionId a) const;
    double value(const std::vector<double>& obs) const;
    ActionId sample(const std::vector<double>& obs, double uniform01) const;
};

// beta * (log pi_i(a) - log mean_{j != i} pi_j(a)), probabilities floored at
// 1e-12 before the logs.
double group_reward(std::size_t expert_index, ActionId action,
                    const std::array<ExpertPolicy, 4>& policies, const std::vector<double>& obs,
                    double beta);

struct ExpertSample {
    std::vector<double> obs;
    ActionId action = ActionId::Cash;
    double old_log_prob = 0.0;
    double old_value = 0.0;
    double target_return = 0.0;   // G: total window reward
};

struct UpdateDiagnostics {
    double clip_term = 0.0;
    double value_term = 0.0;
    double entropy_term = 0.0;
    double grad_norm = 0.0;       // before clipping
    double applied_norm = 0.0;    // after clipping, before the learning rate
};

// One ascent step on mean[L_CLIP - c1 * L_VF + c2 * S]; the gradient norm is
// clipped at 0.5. Throws on non-finite gradients.
UpdateDiagnostics expert_update(ExpertPolicy& policy, std::span<const ExpertSample> batch,
                                const RewardConfig& cfg, double learning_rate);

struct RouterSample {
    std::vector<double> obs;
    std::size_t choice = 0;          // sampled dominant expert
    double choice_return = 0.0;      // that expert's realized window return
    double aggregated_return = 0.0;  // dense-weight R_t (baseline tracking)
    double baseline = 0.0;
};

// One ascent step on mean[(R_choice - b) * log pi(choice) + c3 * S], clipped
// at 0.5. Because the dominant-expert distribution equals the dense weights,
// this is the unbiased policy gradient of the aggregated return
// R_t = sum_i w_i R_{t,i}.
UpdateDiagnostics router_update(router::RouterPolicy& policy, std::span<const RouterSample> batch,
                                const RewardConfig& cfg, double learning_rate);

struct LabeledObservation {
    std::vector<double> obs;
    regime::RegimeLabel label = regime::RegimeLabel::Consolidation;
};

struct WarmStartResult {
    double final_accuracy = 0.0;   // training accuracy of the 3-class head
    std::size_t epochs_run = 0;
};

// Stage-1 warm start: fits a 3-class softmax regime head by full-batch
// cross-entropy descent, then maps class rows onto expert-prior logits
// (uptrend -> trend row, downtrend -> position row, consolidation -> reversal
// row, breakout row stays neutral at zero) scaled by prior_scale and copies
// them into phi.
WarmStartResult warm_start(router::RouterPolicy& policy,
                           std::span<const LabeledObservation> labeled, std::size_t epochs,
                           double learning_rate = 0.5, double prior_scale = 1.0);

// Standalone 3-class softmax head (also used by the modality ablation).
struct RegimeClassifier {
    std::size_t obs_dim = router::kObservationDim;
    std::vector<double> weights;   // 3 x obs_dim
    std::array<double, 3> bias{};

    static RegimeClassifier make(std::size_t obs_dim);
    std::array<double, 3> probs(const std::vector<double>& obs) const;
    regime::RegimeLabel predict(const std::vector<double>& obs) const;
};

double train_classifier(RegimeClassifier& clf, std::span<const LabeledObservation> labeled,
                        std::size_t epochs, double learning_rate);   // returns final accuracy
double classifier_accuracy(const RegimeClassifier& clf, std::span<const LabeledObservation> labeled);

struct TrainConfig {
    std::size_t episodes = 200;
    std::size_t batch_size = 16;      // cap on samples per update
    std::size_t update_every = 4;     // windows between gradient updates
    double learning_rate = 3e-5;      // conservative base rate; suites override
    double router_learning_rate = 0.0;   // 0 -> use learning_rate
    double baseline_decay = 0.9;
    std::uint64_t seed = 42;
    std::size_t lookback = 100;
    std::size_t horizon = 90;
    std::size_t stride = 90;
    RewardConfig reward;
    backtest::ExecutionConfig execution;
    strategy::StrategyParams strategy_params;
};

struct EpisodeStats {
    std::size_t episode = 0;
    double mean_aggregated_return = 0.0;
    double mean_router_reward = 0.0;
    std::array<double, 4> mean_weights{};
    std::array<double, 4> mean_expert_reward{};
    std::array<std::size_t, strategy::kActionCount> action_histogram{};
};

struct TrainResult {
    router::RouterPolicy router;
    std::array<ExpertPolicy, 4> experts;
    std::vector<EpisodeStats> curve;
    bool diverged = false;
    std::size_t episodes_run = 0;
};

// Episode = one pass over one asset's training windows (assets round-robin).
// Fully deterministic for a fixed (config, seed): RNG streams are derived per
// (seed, episode, window, expert).
TrainResult train_loop(const std::vector<market_data::BarSeries>& assets, const TrainConfig& cfg,
                       std::optional<router::RouterPolicy> initial_router = std::nullopt);

}  // namespace mixbt::training

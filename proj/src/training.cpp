#include "mixbt/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "mixbt/kernels.hpp"
#include "mixbt/rng.hpp"

namespace mixbt::training {

namespace {

constexpr double kProbFloor = 1e-12;

bool finite(double x) { return std::isfinite(x); }

double clip_gradient(std::vector<double*> const& parts, std::vector<std::size_t> const& sizes,
                     double max_norm, double& raw_norm) {
    double sq = 0.0;
    for (std::size_t p = 0; p < parts.size(); ++p)
        for (std::size_t i = 0; i < sizes[p]; ++i) sq += parts[p][i] * parts[p][i];
    raw_norm = std::sqrt(sq);
    if (!finite(raw_norm)) throw std::runtime_error("gradient is not finite");
    if (raw_norm <= max_norm || raw_norm == 0.0) return raw_norm;
    const double scale = max_norm / raw_norm;
    for (std::size_t p = 0; p < parts.size(); ++p)
        for (std::size_t i = 0; i < sizes[p]; ++i) parts[p][i] *= scale;
    return max_norm;
}

}  // namespace

double squash_return(double x, double cap) {
    if (cap <= 0.0) return 0.0;
    return cap * std::tanh(5.0 * x / cap);
}

double squash_sharpe(double x, double cap) {
    if (cap <= 0.0) return 0.0;
    return cap * std::tanh(x / (2.0 * cap));
}

double base_reward(double tr_excess, double sharpe, double mdd, const RewardConfig& cfg) {
    return cfg.alpha_r * squash_return(tr_excess, cfg.f_cap) +
           cfg.alpha_s * squash_sharpe(sharpe, cfg.g_cap) - cfg.drawdown_penalty * mdd;
}

double clip_objective(double ratio, double advantage, double epsilon) {
    if (ratio <= 0.0) throw std::invalid_argument("clip_objective: ratio must be positive");
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

double value_loss(double value, double target) {
    const double d = value - target;
    return d * d;
}

double entropy(std::span<const double> probs) {
    double s = 0.0;
    for (double p : probs)
        if (p > 0.0) s -= p * std::log(p);
    return s;
}

ExpertPolicy ExpertPolicy::make(ExpertFamily family, std::size_t obs_dim) {
    ExpertPolicy p;
    p.family = family;
    p.obs_dim = obs_dim;
    p.weights.assign(strategy::kActionCount * obs_dim, 0.0);
    p.value_weights.assign(obs_dim, 0.0);
    return p;
}

std::array<double, strategy::kActionCount> ExpertPolicy::probs(
    const std::vector<double>& obs) const {
    if (obs.size() != obs_dim) throw std::invalid_argument("ExpertPolicy: obs dimension mismatch");
    std::array<double, strategy::kActionCount> z{};
    double zmax = -std::numeric_limits<double>::infinity();
    for (ActionId a : strategy::actions_of(family)) {
        const std::size_t j = strategy::action_index(a);
        z[j] = kernels::dot(std::span<const double>(weights).subspan(j * obs_dim, obs_dim), obs) +
               bias[j];
        zmax = std::max(zmax, z[j]);
    }
    std::array<double, strategy::kActionCount> p{};
    double sum = 0.0;
    for (ActionId a : strategy::actions_of(family)) {
        const std::size_t j = strategy::action_index(a);
        p[j] = std::exp(z[j] - zmax);
        sum += p[j];
    }
    for (ActionId a : strategy::actions_of(family)) p[strategy::action_index(a)] /= sum;
    return p;
}

double ExpertPolicy::log_prob(const std::vector<double>& obs, ActionId a) const {
    const auto p = probs(obs);
    return std::log(std::max(p[strategy::action_index(a)], kProbFloor));
}

double ExpertPolicy::value(const std::vector<double>& obs) const {
    return kernels::dot(value_weights, obs) + value_bias;
}

ActionId ExpertPolicy::sample(const std::vector<double>& obs, double uniform01) const {
    const auto p = probs(obs);
    double acc = 0.0;
    const auto& family_actions = strategy::actions_of(family);
    for (ActionId a : family_actions) {
        acc += p[strategy::action_index(a)];
        if (uniform01 < acc) return a;
    }
    return family_actions.back();
}

double group_reward(std::size_t expert_index, ActionId action,
                    const std::array<ExpertPolicy, 4>& policies, const std::vector<double>& obs,
                    double beta) {
    if (expert_index >= 4) throw std::invalid_argument("group_reward: expert index out of range");
    const std::size_t j = strategy::action_index(action);
    const double own = policies[expert_index].probs(obs)[j];
    double others = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (k == expert_index) continue;
        others += policies[k].probs(obs)[j];
    }
    others /= 3.0;
    return beta * (std::log(std::max(own, kProbFloor)) - std::log(std::max(others, kProbFloor)));
}

UpdateDiagnostics expert_update(ExpertPolicy& policy, std::span<const ExpertSample> batch,
                                const RewardConfig& cfg, double learning_rate) {
    if (batch.empty()) throw std::invalid_argument("expert_update: empty batch");
    const std::size_t dim = policy.obs_dim;
    std::vector<double> g_w(policy.weights.size(), 0.0);
    std::array<double, strategy::kActionCount> g_b{};
    std::vector<double> g_vw(dim, 0.0);
    double g_vb = 0.0;

    UpdateDiagnostics diag;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const auto& family_actions = strategy::actions_of(policy.family);

    for (const auto& s : batch) {
        const auto p = policy.probs(s.obs);
        const std::size_t a = strategy::action_index(s.action);
        const double log_p = std::log(std::max(p[a], kProbFloor));
        const double ratio = std::exp(log_p - s.old_log_prob);
        const double advantage = s.target_return - s.old_value;

        const double unclipped = ratio * advantage;
        const double clipped =
            std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * advantage;
        diag.clip_term += std::min(unclipped, clipped) * inv_n;
        const bool pass_through = unclipped <= clipped;

        const double v = policy.value(s.obs);
        diag.value_term += value_loss(v, s.target_return) * inv_n;

        double ent = 0.0;
        for (ActionId fa : family_actions) {
            const double pj = p[strategy::action_index(fa)];
            if (pj > 0.0) ent -= pj * std::log(pj);
        }
        diag.entropy_term += ent * inv_n;

        // d/dz_j of the per-sample objective, unmasked logits only.
        for (ActionId fa : family_actions) {
            const std::size_t j = strategy::action_index(fa);
            const double pj = p[j];
            const double indicator = j == a ? 1.0 : 0.0;
            double dz = 0.0;
            if (pass_through) dz += advantage * ratio * (indicator - pj);
            dz += cfg.c2 * (-pj * (std::log(std::max(pj, kProbFloor)) + ent));
            g_b[j] += dz * inv_n;
            for (std::size_t d = 0; d < dim; ++d) g_w[j * dim + d] += dz * s.obs[d] * inv_n;
        }

        const double dv = -cfg.c1 * 2.0 * (v - s.target_return) * inv_n;
        for (std::size_t d = 0; d < dim; ++d) g_vw[d] += dv * s.obs[d];
        g_vb += dv;
    }

    diag.applied_norm = clip_gradient({g_w.data(), g_b.data(), g_vw.data(), &g_vb},
                                      {g_w.size(), g_b.size(), g_vw.size(), 1}, 0.5,
                                      diag.grad_norm);

    for (std::size_t i = 0; i < policy.weights.size(); ++i)
        policy.weights[i] += learning_rate * g_w[i];
    for (std::size_t j = 0; j < strategy::kActionCount; ++j) policy.bias[j] += learning_rate * g_b[j];
    for (std::size_t d = 0; d < dim; ++d) policy.value_weights[d] += learning_rate * g_vw[d];
    policy.value_bias += learning_rate * g_vb;
    return diag;
}

UpdateDiagnostics router_update(router::RouterPolicy& policy, std::span<const RouterSample> batch,
                                const RewardConfig& cfg, double learning_rate) {
    if (policy.mode != router::RouterMode::Dynamic)
        throw std::invalid_argument("router_update: Dynamic mode only");
    if (batch.empty()) throw std::invalid_argument("router_update: empty batch");

    const std::size_t dim = policy.obs_dim;
    std::vector<double> g_phi(policy.phi.size(), 0.0);
    std::array<double, 4> g_bias{};

    UpdateDiagnostics diag;
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    for (const auto& s : batch) {
        auto z = policy.logits(s.obs);
        double zmax = *std::max_element(z.begin(), z.end());
        std::array<double, 4> p{};
        double sum = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            p[i] = std::exp((z[i] - zmax) / policy.temperature);
            sum += p[i];
        }
        for (double& v : p) v /= sum;

        const double advantage = s.choice_return - s.baseline;
        const double ent = entropy(p);
        diag.clip_term += advantage * std::log(std::max(p[s.choice], kProbFloor)) * inv_n;
        diag.entropy_term += ent * inv_n;

        for (std::size_t i = 0; i < 4; ++i) {
            const double indicator = i == s.choice ? 1.0 : 0.0;
            double dz = advantage * (indicator - p[i]);
            dz += cfg.c3 * (-p[i] * (std::log(std::max(p[i], kProbFloor)) + ent));
            dz /= policy.temperature;
            g_bias[i] += dz * inv_n;
            for (std::size_t d = 0; d < dim; ++d) g_phi[i * dim + d] += dz * s.obs[d] * inv_n;
        }
    }

    diag.applied_norm = clip_gradient({g_phi.data(), g_bias.data()}, {g_phi.size(), g_bias.size()},
                                      0.5, diag.grad_norm);

    for (std::size_t i = 0; i < policy.phi.size(); ++i) policy.phi[i] += learning_rate * g_phi[i];
    for (std::size_t i = 0; i < 4; ++i) policy.bias[i] += learning_rate * g_bias[i];
    return diag;
}

RegimeClassifier RegimeClassifier::make(std::size_t obs_dim) {
    RegimeClassifier clf;
    clf.obs_dim = obs_dim;
    clf.weights.assign(3 * obs_dim, 0.0);
    return clf;
}

std::array<double, 3> RegimeClassifier::probs(const std::vector<double>& obs) const {
    std::array<double, 3> z{};
    for (std::size_t c = 0; c < 3; ++c)
        z[c] = kernels::dot(std::span<const double>(weights).subspan(c * obs_dim, obs_dim), obs) +
               bias[c];
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

regime::RegimeLabel RegimeClassifier::predict(const std::vector<double>& obs) const {
    const auto p = probs(obs);
    std::size_t best = 0;
    for (std::size_t c = 1; c < 3; ++c)
        if (p[c] > p[best]) best = c;
    return static_cast<regime::RegimeLabel>(best);
}

double classifier_accuracy(const RegimeClassifier& clf,
                           std::span<const LabeledObservation> labeled) {
    if (labeled.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& s : labeled)
        if (clf.predict(s.obs) == s.label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(labeled.size());
}

double train_classifier(RegimeClassifier& clf, std::span<const LabeledObservation> labeled,
                        std::size_t epochs, double learning_rate) {
    if (labeled.empty()) throw std::invalid_argument("train_classifier: empty label set");
    const std::size_t dim = clf.obs_dim;
    const double inv_n = 1.0 / static_cast<double>(labeled.size());
    for (std::size_t e = 0; e < epochs; ++e) {
        std::vector<double> g_w(clf.weights.size(), 0.0);
        std::array<double, 3> g_b{};
        for (const auto& s : labeled) {
            const auto p = clf.probs(s.obs);
            const auto y = static_cast<std::size_t>(s.label);
            for (std::size_t c = 0; c < 3; ++c) {
                const double err = (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
                g_b[c] += err;
                for (std::size_t d = 0; d < dim; ++d) g_w[c * dim + d] += err * s.obs[d];
            }
        }
        for (std::size_t i = 0; i < clf.weights.size(); ++i)
            clf.weights[i] -= learning_rate * g_w[i];
        for (std::size_t c = 0; c < 3; ++c) clf.bias[c] -= learning_rate * g_b[c];
    }
    return classifier_accuracy(clf, labeled);
}

WarmStartResult warm_start(router::RouterPolicy& policy,
                           std::span<const LabeledObservation> labeled, std::size_t epochs,
                           double learning_rate, double prior_scale) {
    if (policy.mode != router::RouterMode::Dynamic)
        throw std::invalid_argument("warm_start: Dynamic mode only");
    if (labeled.empty()) throw std::invalid_argument("warm_start: empty label set");
    if (epochs == 0) return {0.0, 0};

    RegimeClassifier clf = RegimeClassifier::make(policy.obs_dim);
    const double acc = train_classifier(clf, labeled, epochs, learning_rate);

    // Class rows -> expert-prior rows: trend tracks the uptrend class, the
    // position family (short-capable) tracks downtrend, reversal tracks
    // consolidation. Breakout has no regime class of its own and keeps a
    // neutral zero row, which leaves it mid-field on every window.
    const std::size_t dim = policy.obs_dim;
    const auto up = static_cast<std::size_t>(regime::RegimeLabel::Uptrend);
    const auto down = static_cast<std::size_t>(regime::RegimeLabel::Downtrend);
    const auto cons = static_cast<std::size_t>(regime::RegimeLabel::Consolidation);
    for (std::size_t d = 0; d < dim; ++d) {
        policy.phi[0 * dim + d] = prior_scale * clf.weights[up * dim + d];
        policy.phi[1 * dim + d] = prior_scale * clf.weights[cons * dim + d];
        policy.phi[2 * dim + d] = 0.0;
        policy.phi[3 * dim + d] = prior_scale * clf.weights[down * dim + d];
    }
    policy.bias[0] = prior_scale * clf.bias[up];
    policy.bias[1] = prior_scale * clf.bias[cons];
    policy.bias[2] = 0.0;
    policy.bias[3] = prior_scale * clf.bias[down];
    return {acc, epochs};
}

namespace {

struct WindowPerf {
    double tr = 0.0;
    double sharpe = 0.0;   // 0 when undefined
    double mdd = 0.0;
};

struct PreparedAsset {
    const market_data::BarSeries* series = nullptr;
    std::unique_ptr<strategy::SeriesCache> cache;
    std::vector<market_data::WindowRef> windows;        // usable windows only
    std::vector<std::vector<double>> obs;               // per window
    std::vector<std::array<WindowPerf, strategy::kActionCount>> perf;
    std::vector<double> bh_tr;                          // LongOnly benchmark per window
};

PreparedAsset prepare_asset(const market_data::BarSeries& series, const TrainConfig& cfg) {
    PreparedAsset pa;
    pa.series = &series;
    pa.cache = std::make_unique<strategy::SeriesCache>(series, cfg.strategy_params);

    std::size_t max_warmup = 0;
    for (std::size_t i = 0; i < strategy::kActionCount; ++i)
        max_warmup = std::max(max_warmup, strategy::warmup(strategy::action_from_index(i),
                                                           cfg.strategy_params));
    const std::size_t obs_warmup = cfg.lookback + 99;   // feature matrix + MA100

    for (const auto& w :
         market_data::windows(series.size(), cfg.lookback, cfg.horizon, cfg.stride)) {
        const std::size_t t_dec = w.decision_index();
        if (t_dec < obs_warmup || w.horizon_begin < max_warmup) continue;
        pa.windows.push_back(w);
        pa.obs.push_back(router::build_observation(series, t_dec, router::ObservationVariant::Full,
                                                   cfg.lookback));
        std::array<WindowPerf, strategy::kActionCount> row{};
        for (std::size_t ai = 0; ai < strategy::kActionCount; ++ai) {
            const auto res = backtest::run_strategy(strategy::action_from_index(ai), *pa.cache, w,
                                                    cfg.strategy_params, cfg.execution);
            row[ai].tr = res.metrics.total_return;
            row[ai].sharpe = res.metrics.sharpe.value_or(0.0);
            row[ai].mdd = res.metrics.max_drawdown;
        }
        pa.perf.push_back(row);
        pa.bh_tr.push_back(row[strategy::action_index(ActionId::LongOnly)].tr);
    }
    return pa;
}

}  // namespace

TrainResult train_loop(const std::vector<market_data::BarSeries>& assets, const TrainConfig& cfg,
                       std::optional<router::RouterPolicy> initial_router) {
    if (assets.empty()) throw std::invalid_argument("train_loop: no assets");
    if (!cfg.reward.valid()) throw std::invalid_argument("train_loop: invalid reward config");

    std::vector<PreparedAsset> prepared;
    prepared.reserve(assets.size());
    for (const auto& a : assets) {
        PreparedAsset pa = prepare_asset(a, cfg);
        if (pa.windows.empty())
            throw std::invalid_argument("train_loop: asset '" + a.asset +
                                        "' has no usable training windows");
        prepared.push_back(std::move(pa));
    }

    TrainResult result;
    result.router = initial_router ? *initial_router
                                   : router::RouterPolicy::make(router::RouterMode::Dynamic,
                                                                router::kObservationDim, cfg.seed);
    for (std::size_t i = 0; i < 4; ++i)
        result.experts[i] = ExpertPolicy::make(strategy::family_from_index(i));

    const double lr_expert = cfg.learning_rate;
    const double lr_router =
        cfg.router_learning_rate > 0.0 ? cfg.router_learning_rate : cfg.learning_rate;
    double baseline = 0.0;

    for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
        const PreparedAsset& pa = prepared[episode % prepared.size()];
        EpisodeStats stats;
        stats.episode = episode;

        std::array<std::vector<ExpertSample>, 4> expert_buf;
        std::vector<RouterSample> router_buf;
        std::vector<double> flushed_returns;

        // On a non-finite gradient the policies roll back to the snapshot
        // taken before the failing update (last good checkpoint).
        auto flush = [&]() -> bool {
            const auto snap_experts = result.experts;
            const auto snap_router = result.router;
            try {
                for (std::size_t i = 0; i < 4; ++i) {
                    if (!expert_buf[i].empty())
                        expert_update(result.experts[i], expert_buf[i], cfg.reward, lr_expert);
                    expert_buf[i].clear();
                }
                if (!router_buf.empty() && result.router.mode == router::RouterMode::Dynamic)
                    router_update(result.router, router_buf, cfg.reward, lr_router);
                for (const auto& s : router_buf) {
                    baseline = cfg.baseline_decay * baseline +
                               (1.0 - cfg.baseline_decay) * s.aggregated_return;
                }
                router_buf.clear();
                return true;
            } catch (const std::runtime_error&) {
                result.experts = snap_experts;
                result.router = snap_router;
                return false;
            }
        };

        const std::size_t n_windows = pa.windows.size();
        double sum_R = 0.0, sum_adv = 0.0;
        std::array<double, 4> sum_w{}, sum_reward{};

        bool diverged = false;
        for (std::size_t wi = 0; wi < n_windows && !diverged; ++wi) {
            const auto& obs = pa.obs[wi];
            const auto weights =
                route(result.router, obs, std::nullopt, rng::mix(cfg.seed, episode, wi, 77));

            rng::Stream choice_stream(rng::mix(cfg.seed, episode, wi, 4));
            const std::size_t choice = choice_stream.categorical(weights.w);

            std::array<ActionId, 4> chosen{};
            std::array<double, 4> expert_return{};
            for (std::size_t i = 0; i < 4; ++i) {
                rng::Stream s(rng::mix(cfg.seed, episode, wi, i));
                chosen[i] = result.experts[i].sample(obs, s.uniform01());
                expert_return[i] = pa.perf[wi][strategy::action_index(chosen[i])].tr;
            }
            const double R_t = backtest::aggregate(weights.w, expert_return);

            for (std::size_t i = 0; i < 4; ++i) {
                const auto& perf = pa.perf[wi][strategy::action_index(chosen[i])];
                const double g = base_reward(perf.tr - pa.bh_tr[wi], perf.sharpe, perf.mdd,
                                             cfg.reward) +
                                 group_reward(i, chosen[i], result.experts, obs, cfg.reward.beta);
                ExpertSample sample;
                sample.obs = obs;
                sample.action = chosen[i];
                sample.old_log_prob = result.experts[i].log_prob(obs, chosen[i]);
                sample.old_value = result.experts[i].value(obs);
                sample.target_return = g;
                expert_buf[i].push_back(std::move(sample));

                stats.action_histogram[strategy::action_index(chosen[i])] += 1;
                sum_reward[i] += g;
            }

            RouterSample rs;
            rs.obs = obs;
            rs.choice = choice;
            rs.choice_return = expert_return[choice];
            rs.aggregated_return = R_t;
            rs.baseline = baseline;
            router_buf.push_back(std::move(rs));

            sum_R += R_t;
            sum_adv += R_t - baseline;
            for (std::size_t i = 0; i < 4; ++i) sum_w[i] += weights.w[i];

            const bool at_stride = (wi + 1) % cfg.update_every == 0;
            const bool at_cap = router_buf.size() >= cfg.batch_size;
            if (at_stride || at_cap) diverged = !flush();
        }
        if (!diverged) diverged = !flush();

        const double inv = 1.0 / static_cast<double>(n_windows);
        stats.mean_aggregated_return = sum_R * inv;
        stats.mean_router_reward = sum_adv * inv;
        for (std::size_t i = 0; i < 4; ++i) {
            stats.mean_weights[i] = sum_w[i] * inv;
            stats.mean_expert_reward[i] = sum_reward[i] * inv;
        }
        result.curve.push_back(stats);
        result.episodes_run = episode + 1;
        if (diverged) {
            result.diverged = true;
            break;
        }
    }
    return result;
}

}  // namespace mixbt::training

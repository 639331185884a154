#include "mixbt/evaluate.hpp"

#include <algorithm>
#include <stdexcept>

#include "mixbt/regime.hpp"

namespace mixbt::evaluate {

PreparedSeries prepare_series(const BarSeries& series, const EvalConfig& cfg) {
    PreparedSeries prep;
    prep.series = &series;
    strategy::SeriesCache cache(series, cfg.strategy_params);

    std::size_t max_warmup = 0;
    for (std::size_t i = 0; i < strategy::kActionCount; ++i)
        max_warmup = std::max(max_warmup, strategy::warmup(strategy::action_from_index(i),
                                                           cfg.strategy_params));
    const std::size_t obs_warmup = cfg.lookback + 99;

    for (const auto& w :
         market_data::windows(series.size(), cfg.lookback, cfg.horizon, cfg.stride)) {
        if (w.decision_index() < obs_warmup || w.horizon_begin < max_warmup) continue;
        WindowData wd;
        wd.ref = w;
        wd.obs = router::build_observation(series, w.decision_index(),
                                           router::ObservationVariant::Full, cfg.lookback);
        for (std::size_t ai = 0; ai < strategy::kActionCount; ++ai) {
            const auto res = backtest::run_strategy(strategy::action_from_index(ai), cache, w,
                                                    cfg.strategy_params, cfg.execution);
            auto& curve = wd.rel_curve[ai];
            curve.reserve(res.equity_curve.size());
            const double base = res.equity_curve.front();
            for (double v : res.equity_curve) curve.push_back(v / base);
            wd.tr[ai] = res.metrics.total_return;
        }
        prep.windows.push_back(std::move(wd));
    }
    return prep;
}

namespace {

ActionId greedy_action(const training::ExpertPolicy& policy, const std::vector<double>& obs) {
    const auto p = policy.probs(obs);
    const auto& family_actions = strategy::actions_of(policy.family);
    ActionId best = family_actions.front();
    double best_p = p[strategy::action_index(best)];
    for (ActionId a : family_actions) {
        const double pa = p[strategy::action_index(a)];
        if (pa > best_p) {
            best = a;
            best_p = pa;
        }
    }
    return best;
}

}  // namespace

ModeEvalResult evaluate_portfolio(const PreparedSeries& prep, const router::RouterPolicy& policy,
                                  const std::array<training::ExpertPolicy, 4>& experts,
                                  double initial_cash) {
    if (prep.windows.empty()) throw std::invalid_argument("evaluate_portfolio: no usable windows");

    ModeEvalResult out;
    double equity = initial_cash;
    std::array<double, 4> trailing{};   // previous window's realized expert returns

    for (std::size_t wi = 0; wi < prep.windows.size(); ++wi) {
        const auto& wd = prep.windows[wi];
        const auto weights = route(policy, wd.obs, trailing, wi);

        std::array<ActionId, 4> chosen{};
        std::array<double, 4> expert_tr{};
        for (std::size_t i = 0; i < 4; ++i) {
            chosen[i] = greedy_action(experts[i], wd.obs);
            expert_tr[i] = wd.tr[strategy::action_index(chosen[i])];
        }

        // Blend the four relative slices bar by bar under this window's weights.
        const std::size_t bars = wd.rel_curve[0].size();
        for (std::size_t b = 0; b < bars; ++b) {
            double rel = 0.0;
            for (std::size_t i = 0; i < 4; ++i)
                rel += weights.w[i] * wd.rel_curve[strategy::action_index(chosen[i])][b];
            out.equity.push_back(equity * rel);
        }
        const double window_return = backtest::aggregate(weights.w, expert_tr);
        equity *= 1.0 + window_return;

        out.window_returns.push_back(window_return);
        out.weights.push_back(weights.w);
        out.chosen.push_back(chosen);
        trailing = expert_tr;
    }
    out.metrics = metrics::report(out.equity);
    return out;
}

std::vector<training::LabeledObservation> build_labeled_windows(
    const BarSeries& series, const EvalConfig& cfg, router::ObservationVariant variant) {
    std::vector<training::LabeledObservation> out;
    const std::size_t obs_warmup = cfg.lookback + 99;
    for (const auto& w :
         market_data::windows(series.size(), cfg.lookback, cfg.horizon, cfg.stride)) {
        if (w.decision_index() < obs_warmup) continue;
        training::LabeledObservation lo;
        lo.obs = router::build_observation(series, w.decision_index(), variant, cfg.lookback);
        lo.label = regime::label_window(series, w);
        out.push_back(std::move(lo));
    }
    return out;
}

}  // namespace mixbt::evaluate

#include "mixbt/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixbt::backtest {

namespace {

constexpr double kEps = 1e-9;

void check_action(const TradeAction& action) {
    const bool sized = action.verb == strategy::Verb::Buy || action.verb == strategy::Verb::Sell ||
                       action.verb == strategy::Verb::AddLayer;
    if (sized && (action.fraction <= 0.0 || action.fraction > 1.0))
        throw std::invalid_argument("apply_action: fraction must be in (0, 1] for sized verbs");
    if (!sized && action.fraction != 0.0)
        throw std::invalid_argument("apply_action: fraction must be 0 for " +
                                    strategy::to_string(action.verb));
}

}  // namespace

Portfolio apply_action(const Portfolio& p, const TradeAction& action, double price,
                       const ExecutionConfig& cfg) {
    if (price <= 0.0) throw std::invalid_argument("apply_action: price must be positive");
    check_action(action);

    Portfolio out = p;
    out.last_price = price;
    const double equity = out.equity();
    const double buy_px = price * (1.0 + cfg.slippage);
    const double sell_px = price * (1.0 - cfg.slippage);

    auto open_long = [&]() {
        const double notional = action.fraction * equity;
        const double fee = notional * cfg.fee_rate;
        if (notional + fee > out.cash + kEps)
            throw std::invalid_argument("apply_action: fraction > available");
        out.shares += notional / buy_px;
        out.cash -= notional + fee;
    };
    auto open_short = [&]() {
        if (!cfg.allow_short) throw std::invalid_argument("apply_action: shorting disallowed");
        const double notional = action.fraction * equity;
        out.shares -= notional / sell_px;
        out.cash += notional - notional * cfg.fee_rate;
    };

    switch (action.verb) {
        case strategy::Verb::Hold:
            break;
        case strategy::Verb::Close: {
            if (out.shares > 0.0) {
                const double proceeds = out.shares * sell_px;
                out.cash += proceeds - proceeds * cfg.fee_rate;
            } else if (out.shares < 0.0) {
                const double cost = -out.shares * buy_px;
                out.cash -= cost + cost * cfg.fee_rate;
            }
            out.shares = 0.0;
            break;
        }
        case strategy::Verb::Buy:
        case strategy::Verb::AddLayer: {
            if (out.shares < 0.0) {
                if (action.verb == strategy::Verb::AddLayer) {
                    open_short();
                } else {
                    // Partial cover, clamped at flat.
                    const double want = std::min(action.fraction * equity, -out.shares * buy_px);
                    out.cash -= want + want * cfg.fee_rate;
                    out.shares += want / buy_px;
                }
            } else {
                open_long();
            }
            break;
        }
        case strategy::Verb::Sell: {
            if (out.shares > 0.0) {
                // Partial reduce, clamped at flat.
                const double want = std::min(action.fraction * equity, out.shares * sell_px);
                out.cash += want - want * cfg.fee_rate;
                out.shares -= want / sell_px;
            } else {
                open_short();
            }
            break;
        }
    }
    return out;
}

namespace {

struct Engine {
    const SeriesCache& cache;
    const ExecutionConfig& cfg;
    BacktestResult result;
    Portfolio pf;

    Engine(const SeriesCache& c, const ExecutionConfig& e, const WindowRef& w, std::string label)
        : cache(c), cfg(e) {
        result.asset = c.series().asset;
        result.label = std::move(label);
        result.window_begin = w.horizon_begin;
        result.window_end = w.horizon_end;
        pf.cash = cfg.initial_cash;
        pf.last_price = c.close(w.horizon_begin);
    }

    // Clamp a cash-consuming request so the fill stays fundable.
    double fundable_fraction(double requested, double price) const {
        const double equity = pf.cash + pf.shares * price;
        if (equity <= 0.0) return 0.0;
        const double max_notional = pf.cash / (1.0 + cfg.fee_rate);
        const double requested_notional = requested * equity;
        if (requested_notional <= max_notional) return requested;
        return std::max(0.0, max_notional / equity);
    }

    void record(std::size_t t, const TradeAction& action, double price) {
        TradeRecord rec;
        rec.timestamp = cache.series()[t].timestamp;
        rec.verb = strategy::to_string(action.verb);
        rec.price = price;
        rec.fraction = action.fraction;
        rec.notional = action.fraction * (pf.cash + pf.shares * price);
        rec.fees = rec.notional * cfg.fee_rate;
        rec.reason = action.reason;
        result.trades.push_back(rec);
    }

    // Applies the action at bar t; returns false when the fill was empty and
    // the caller should keep its previous strategy state.
    bool apply_at(std::size_t t, TradeAction action) {
        const double price = cache.close(t);
        const bool cash_consuming =
            (action.verb == strategy::Verb::Buy || action.verb == strategy::Verb::AddLayer) &&
            pf.shares >= 0.0;
        if (cash_consuming) {
            const double filled = fundable_fraction(action.fraction, price);
            if (filled <= 0.0) return false;
            action.fraction = filled;
        }
        if (action.verb != strategy::Verb::Hold) record(t, action, price);
        pf = apply_action(pf, action, price, cfg);
        return true;
    }

    void mark(std::size_t t) {
        pf.last_price = cache.close(t);
        result.equity_curve.push_back(pf.equity());
    }

    bool breached() const { return pf.equity() <= 0.0; }

    void finish() {
        while (!result.equity_curve.empty() && result.equity_curve.back() <= 0.0) {
            result.equity_curve.pop_back();
            result.aborted = true;
            result.abort_reason = "margin breach";
        }
        result.returns = metrics::simple_returns(result.equity_curve);
        if (result.equity_curve.size() >= 2) {
            result.metrics = metrics::report(result.equity_curve);
        } else {
            result.metrics = {};
            result.metrics.periods = result.equity_curve.size();
        }
    }
};

}  // namespace

BacktestResult run_strategy(ActionId a, const SeriesCache& cache, const WindowRef& w,
                            const StrategyParams& params, const ExecutionConfig& cfg) {
    if (w.horizon_end > cache.size() || w.horizon_begin >= w.horizon_end)
        throw std::invalid_argument("run_strategy: window out of range");
    if (w.horizon_begin < strategy::warmup(a, params))
        throw std::invalid_argument("run_strategy: warm-up not available before window start");

    Engine eng(cache, cfg, w, strategy::to_string(a));
    strategy::StrategyState state;

    for (std::size_t t = w.horizon_begin; t < w.horizon_end; ++t) {
        if (t + 1 == w.horizon_end) {
            if (state.position != 0) {
                eng.apply_at(t, {strategy::Verb::Close, 0.0, "end_of_window"});
                state = strategy::StrategyState{};
            }
        } else {
            auto step = strategy_step(a, state, cache, t, params);
            if (eng.apply_at(t, step.action)) state = step.state;
        }
        eng.mark(t);
        if (eng.breached()) break;
    }
    eng.finish();
    return eng.result;
}

BacktestResult run_expert(ExpertFamily family, const SeriesCache& cache, const WindowRef& w,
                          const ExpertSelector& selector, const StrategyParams& params,
                          const ExecutionConfig& cfg) {
    const ActionId chosen = selector(family, w);
    if (strategy::family_of(chosen) != family)
        throw std::invalid_argument("run_expert: selector returned " + strategy::to_string(chosen) +
                                    " outside the " + strategy::to_string(family) + " family");
    BacktestResult result = run_strategy(chosen, cache, w, params, cfg);
    result.label = strategy::to_string(family) + ":" + strategy::to_string(chosen);
    return result;
}

double aggregate(const std::array<double, 4>& weights, const std::array<double, 4>& expert_returns) {
    double sum = 0.0;
    for (double w : weights) {
        if (w < -1e-9) throw std::invalid_argument("aggregate: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("aggregate: weights off the simplex");
    double out = 0.0;
    for (std::size_t i = 0; i < 4; ++i) out += weights[i] * expert_returns[i];
    return out;
}

}  // namespace mixbt::backtest

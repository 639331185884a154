#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mixbt/market_data.hpp"
#include "mixbt/metrics.hpp"
#include "mixbt/strategy.hpp"

namespace mixbt::backtest {

using market_data::WindowRef;
using strategy::ActionId;
using strategy::ExpertFamily;
using strategy::SeriesCache;
using strategy::StrategyParams;
using strategy::TradeAction;

struct ExecutionConfig {
    double initial_cash = 100000.0;
    double fee_rate = 0.0;       // fraction of traded notional
    double slippage = 0.0;       // fraction of price, charged against the trader
    bool allow_short = true;
};

struct Portfolio {
    double cash = 0.0;
    double shares = 0.0;         // signed
    double last_price = 0.0;

    double equity() const { return cash + shares * last_price; }
};

// Fills at bar close. Buy raises signed exposure (covers shorts first),
// Sell lowers it (reduces longs, opens shorts when flat); reducing verbs
// clamp at flat rather than flipping. Throws when a Buy needs more cash
// than available ("fraction > available") or shorting is disallowed.
Portfolio apply_action(const Portfolio& p, const TradeAction& action, double price,
                       const ExecutionConfig& cfg);

struct TradeRecord {
    std::int64_t timestamp = 0;
    std::string verb;
    double price = 0.0;
    double fraction = 0.0;     // of equity, as filled
    double notional = 0.0;
    double fees = 0.0;
    std::string reason;
};

struct BacktestResult {
    std::string asset;
    std::string label;                  // strategy / baseline / expert tag
    std::size_t window_begin = 0;       // first traded bar
    std::size_t window_end = 0;         // one past last traded bar
    std::vector<double> equity_curve;   // one entry per traded bar
    std::vector<double> returns;        // simple per-bar returns
    std::vector<TradeRecord> trades;
    metrics::MetricReport metrics;
    bool aborted = false;               // margin breach; log is partial
    std::string abort_reason;
};

// Replays one strategy over the traded slice [w.horizon_begin, w.horizon_end).
// Warm-up must be available before the slice. Entries and adds are clamped to
// available cash (an unfundable add leaves the state unchanged); any open
// position is force-closed on the last bar.
BacktestResult run_strategy(ActionId a, const SeriesCache& cache, const WindowRef& w,
                            const StrategyParams& params, const ExecutionConfig& cfg);

using ExpertSelector = std::function<ActionId(ExpertFamily, const WindowRef&)>;

// Runs the selector's choice for the whole window; the result is tagged with
// the chosen action. Throws if the selector leaves the family's action set.
BacktestResult run_expert(ExpertFamily family, const SeriesCache& cache, const WindowRef& w,
                          const ExpertSelector& selector, const StrategyParams& params,
                          const ExecutionConfig& cfg);

// R_t = sum_i w_i * R_{t,i}; weights must lie on the simplex within 1e-9.
double aggregate(const std::array<double, 4>& weights, const std::array<double, 4>& expert_returns);

}  // namespace mixbt::backtest

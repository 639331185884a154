#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mixbt/backtest.hpp"
#include "mixbt/market_data.hpp"
#include "mixbt/router.hpp"
#include "mixbt/training.hpp"

namespace mixbt::evaluate {

using market_data::BarSeries;
using market_data::WindowRef;
using strategy::ActionId;

// Per-window data prepared once per series: the router observation at the
// decision bar and, for every action, the relative equity path over the
// traded slice (1.0 at the first bar).
struct WindowData {
    WindowRef ref;
    std::vector<double> obs;
    std::array<std::vector<double>, strategy::kActionCount> rel_curve;
    std::array<double, strategy::kActionCount> tr{};
};

struct PreparedSeries {
    const BarSeries* series = nullptr;
    std::vector<WindowData> windows;
};

struct EvalConfig {
    std::size_t lookback = 100;
    std::size_t horizon = 90;
    std::size_t stride = 90;
    backtest::ExecutionConfig execution;
    strategy::StrategyParams strategy_params;
};

PreparedSeries prepare_series(const BarSeries& series, const EvalConfig& cfg);

struct ModeEvalResult {
    metrics::MetricReport metrics;
    std::vector<double> equity;                        // chained per-bar curve
    std::vector<double> window_returns;                // R_t per window
    std::vector<std::array<double, 4>> weights;        // per window
    std::vector<std::array<ActionId, 4>> chosen;       // per window
};

// Walks the prepared windows in order. Expert actions are the greedy argmax
// of each expert policy; the four virtual expert slices are re-blended under
// the router weights at each window boundary. BestExpert conditions on the
// previous window's realized expert returns (first window: zeros, so ties
// resolve to the trend expert).
ModeEvalResult evaluate_portfolio(const PreparedSeries& prep, const router::RouterPolicy& policy,
                                  const std::array<training::ExpertPolicy, 4>& experts,
                                  double initial_cash);

// (observation, next-window regime label) pairs for SFT-style datasets.
std::vector<training::LabeledObservation> build_labeled_windows(
    const BarSeries& series, const EvalConfig& cfg,
    router::ObservationVariant variant = router::ObservationVariant::Full);

}  // namespace mixbt::evaluate

#pragma once

#include <string>

#include "mixbt/backtest.hpp"
#include "mixbt/market_data.hpp"

namespace mixbt::baselines {

using market_data::BarSeries;
using market_data::WindowRef;

enum class BaselineKind { BH, MACD, KDJRSI, CR, BBI, WR, BIAS };

inline constexpr std::size_t kBaselineCount = 7;

std::string to_string(BaselineKind k);
BaselineKind baseline_from_string(const std::string& s);
const std::array<BaselineKind, kBaselineCount>& all_baselines();

struct BaselineParams {
    std::size_t wr_period = 14;
    std::size_t bias_period = 20;
    // MACD uses EMA(12) - EMA(26); BBI averages MA(3,6,12,24).
    bool long_short = false;   // false: signal -1 holds cash instead of shorting
};

// Daily position sign from the rule's formula over bars <= t. Sign is 0 on
// exact ties. B&H is always +1 (always-long benchmark; the forward-looking
// sign form would be an oracle, not a baseline).
int baseline_signal(BaselineKind kind, const BarSeries& series, std::size_t t,
                    const BaselineParams& params = {});

std::size_t baseline_warmup(BaselineKind kind, const BaselineParams& params = {});

// Holds the signal as the position each bar, rebalancing on sign changes,
// through the standard engine.
backtest::BacktestResult run_baseline(BaselineKind kind, const BarSeries& series,
                                      const WindowRef& w, const backtest::ExecutionConfig& cfg,
                                      const BaselineParams& params = {});

}  // namespace mixbt::baselines

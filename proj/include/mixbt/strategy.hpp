#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixbt/indicators.hpp"
#include "mixbt/market_data.hpp"

namespace mixbt::strategy {

using market_data::BarSeries;

// The 11-action policy pool, grouped into four expert families.
enum class ActionId {
    MACross = 1,   // a1
    Momentum,      // a2
    Turtle,        // a3
    Boll,          // a4
    Rsi,           // a5
    Kdj,           // a6
    Volume,        // a7
    Atr,           // a8
    LongOnly,      // a9
    ShortOnly,     // a10
    Cash,          // a11
};

enum class ExpertFamily { Trend, Reversal, Breakout, Position };

inline constexpr std::size_t kActionCount = 11;
inline constexpr std::size_t kFamilyCount = 4;

ExpertFamily family_of(ActionId a);
const std::vector<ActionId>& actions_of(ExpertFamily f);
std::string to_string(ActionId a);
std::string to_string(ExpertFamily f);
ActionId action_from_string(const std::string& s);
ExpertFamily family_from_string(const std::string& s);
std::size_t action_index(ActionId a);           // 0-based
ActionId action_from_index(std::size_t i);
std::size_t family_index(ExpertFamily f);
ExpertFamily family_from_index(std::size_t i);

// Parameter defaults follow the algorithm inputs of the policy pool;
// interpreted predicates (signal scores, add-layer rules) are documented
// at the step functions that use them.
struct MaCrossParams {
    std::size_t fast = 5;
    std::size_t slow = 20;
    std::size_t atr_period = 14;
    double atr_mult = 1.5;
    std::size_t max_layers = 4;
    double trend_threshold = 0.02;
};

struct MomentumParams {
    std::size_t lookback = 10;
    double entry_threshold = 0.02;
    double exit_threshold = 0.005;
    std::size_t atr_period = 14;
    double atr_mult = 1.5;
    std::size_t max_layers = 3;
    double rsi_long = 50.0;
    double rsi_short = 40.0;
};

struct TurtleParams {
    std::size_t entry_period = 20;
    std::size_t exit_period = 10;
    std::size_t atr_period = 20;
    double atr_mult = 2.0;
    std::size_t max_units = 5;
    double take_profit = 0.10;
    double pyramid_atr_step = 0.5;
};

struct BollParams {
    std::size_t period = 20;
    double k = 1.8;
    std::size_t atr_period = 14;
    double atr_mult = 1.8;
    std::size_t max_layers = 3;
};

struct RsiParams {
    std::size_t period = 14;
    double oversold = 35.0;
    double overbought = 65.0;
    double neutral = 50.0;
    std::size_t atr_period = 14;
    double atr_mult = 1.8;
    std::size_t max_layers = 3;
    double profit_target = 0.08;
};

struct KdjParams {
    std::size_t period = 9;
    double j_buy = 10.0;
    double k_buy = 20.0;
    double j_sell = 90.0;
    double k_sell = 80.0;
    std::size_t atr_period = 14;
    double atr_mult = 1.8;
    std::size_t max_layers = 3;
    double profit_target = 0.08;
};

struct VolumeBreakoutParams {
    std::size_t price_window = 20;
    std::size_t volume_window = 5;
    std::size_t ma_period = 10;
    double volume_mult = 1.5;
    std::size_t atr_period = 14;
    double atr_mult = 1.8;
    std::size_t max_layers = 3;
    double exhaustion_ratio = 0.7;
};

struct AtrBreakoutParams {
    std::size_t ma_period = 20;
    std::size_t atr_period = 20;
    double entry_mult = 1.5;
    double exit_mult = 0.75;
    double stop_mult = 1.2;
    std::size_t max_layers = 3;
};

struct PositionParams {
    double long_fraction = 1.0;
    double short_fraction = 0.5;
};

struct StrategyParams {
    MaCrossParams ma_cross;
    MomentumParams momentum;
    TurtleParams turtle;
    BollParams boll;
    RsiParams rsi;
    KdjParams kdj;
    VolumeBreakoutParams volume;
    AtrBreakoutParams atr;
    PositionParams position;
    // Signal-score sizing: entries deploy base + increment per satisfied
    // confirmation, capped at 1.0 of the strategy's equity slice.
    double base_entry_fraction = 0.5;
    double confirmation_increment = 0.25;
};

// Per-strategy position machine. position 0 <=> layers 0 <=> entry list empty.
struct StrategyState {
    int position = 0;                      // -1, 0, +1
    std::size_t layers = 0;
    std::vector<double> entry_prices;      // one per layer
    std::vector<double> layer_fractions;   // equity fraction deployed per layer
    std::optional<double> stop_level;      // cached where the strategy fixes it at entry

    bool consistent(std::size_t max_layers) const;
    double avg_entry() const;
};

enum class Verb { Buy, Sell, AddLayer, Close, Hold };

std::string to_string(Verb v);

struct TradeAction {
    Verb verb = Verb::Hold;
    double fraction = 0.0;   // of current equity; > 0 only for Buy/Sell/AddLayer
    std::string reason;
};

// Immutable per-series indicator bundle shared by all strategy steps.
// Every column is causal, so values at t never depend on bars after t.
class SeriesCache {
public:
    SeriesCache(const BarSeries& series, const StrategyParams& params);

    const BarSeries& series() const { return *series_; }
    const StrategyParams& params() const { return params_; }
    std::size_t size() const { return series_->size(); }
    double close(std::size_t t) const { return (*series_)[t].close; }

    const indicators::IndicatorColumn& sma(std::size_t n) const;
    const indicators::IndicatorColumn& atr(std::size_t n) const;
    const indicators::DonchianChannel& donchian(std::size_t n) const;
    const indicators::IndicatorColumn& rsi14() const { return rsi14_; }
    const indicators::BollingerBands& boll() const { return boll_; }
    const indicators::KdjColumns& kdj() const { return kdj_; }
    // V_t / mean(V_{t-volume_window..t-1})
    const indicators::IndicatorColumn& volume_ratio() const { return volume_ratio_; }

    // k-bar simple return (C_t / C_{t-k} - 1); t must be >= k.
    double price_return(std::size_t t, std::size_t k) const;

private:
    const BarSeries* series_;
    StrategyParams params_;
    std::map<std::size_t, indicators::IndicatorColumn> sma_;
    std::map<std::size_t, indicators::IndicatorColumn> atr_;
    std::map<std::size_t, indicators::DonchianChannel> donchian_;
    indicators::IndicatorColumn rsi14_;
    indicators::BollingerBands boll_;
    indicators::KdjColumns kdj_;
    indicators::IndicatorColumn volume_ratio_;
};

// First bar index at which the action's step may be called.
std::size_t warmup(ActionId a, const StrategyParams& params);

struct StepResult {
    StrategyState state;
    TradeAction action;
};

// One deterministic transition of the given strategy at bar t (decision on
// close of t). No lookahead: the result only depends on bars <= t.
StepResult strategy_step(ActionId a, const StrategyState& state, const SeriesCache& cache,
                         std::size_t t, const StrategyParams& params);

// Family-checked entry points; throw std::invalid_argument on a foreign action.
StepResult trend_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                      const StrategyParams& p);
StepResult reversal_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p);
StepResult breakout_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p);
StepResult position_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p);

}  // namespace mixbt::strategy

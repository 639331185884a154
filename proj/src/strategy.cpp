#include "mixbt/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixbt::strategy {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double min_entry(const StrategyState& s) {
    return *std::min_element(s.entry_prices.begin(), s.entry_prices.end());
}

double max_entry(const StrategyState& s) {
    return *std::max_element(s.entry_prices.begin(), s.entry_prices.end());
}

}  // namespace

ExpertFamily family_of(ActionId a) {
    switch (a) {
        case ActionId::MACross:
        case ActionId::Momentum:
        case ActionId::Turtle: return ExpertFamily::Trend;
        case ActionId::Boll:
        case ActionId::Rsi:
        case ActionId::Kdj: return ExpertFamily::Reversal;
        case ActionId::Volume:
        case ActionId::Atr: return ExpertFamily::Breakout;
        default: return ExpertFamily::Position;
    }
}

const std::vector<ActionId>& actions_of(ExpertFamily f) {
    static const std::vector<ActionId> trend{ActionId::MACross, ActionId::Momentum, ActionId::Turtle};
    static const std::vector<ActionId> reversal{ActionId::Boll, ActionId::Rsi, ActionId::Kdj};
    static const std::vector<ActionId> breakout{ActionId::Volume, ActionId::Atr};
    static const std::vector<ActionId> position{ActionId::LongOnly, ActionId::ShortOnly, ActionId::Cash};
    switch (f) {
        case ExpertFamily::Trend: return trend;
        case ExpertFamily::Reversal: return reversal;
        case ExpertFamily::Breakout: return breakout;
        default: return position;
    }
}

std::string to_string(ActionId a) {
    switch (a) {
        case ActionId::MACross: return "MACross";
        case ActionId::Momentum: return "Momentum";
        case ActionId::Turtle: return "Turtle";
        case ActionId::Boll: return "Boll";
        case ActionId::Rsi: return "RSI";
        case ActionId::Kdj: return "KDJ";
        case ActionId::Volume: return "Volume";
        case ActionId::Atr: return "ATR";
        case ActionId::LongOnly: return "LongOnly";
        case ActionId::ShortOnly: return "ShortOnly";
        default: return "Cash";
    }
}

std::string to_string(ExpertFamily f) {
    switch (f) {
        case ExpertFamily::Trend: return "trend";
        case ExpertFamily::Reversal: return "reversal";
        case ExpertFamily::Breakout: return "breakout";
        default: return "position";
    }
}

ActionId action_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kActionCount; ++i) {
        const ActionId a = action_from_index(i);
        if (to_string(a) == s) return a;
    }
    throw std::invalid_argument("unknown action '" + s + "'");
}

ExpertFamily family_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kFamilyCount; ++i) {
        if (to_string(family_from_index(i)) == s) return family_from_index(i);
    }
    throw std::invalid_argument("unknown expert family '" + s + "'");
}

std::size_t action_index(ActionId a) { return static_cast<std::size_t>(a) - 1; }

ActionId action_from_index(std::size_t i) {
    if (i >= kActionCount) throw std::invalid_argument("action index out of range");
    return static_cast<ActionId>(i + 1);
}

std::size_t family_index(ExpertFamily f) { return static_cast<std::size_t>(f); }

ExpertFamily family_from_index(std::size_t i) {
    if (i >= kFamilyCount) throw std::invalid_argument("family index out of range");
    return static_cast<ExpertFamily>(i);
}

bool StrategyState::consistent(std::size_t max_layers) const {
    const bool flat = position == 0;
    if (flat != (layers == 0) || flat != entry_prices.empty()) return false;
    if (entry_prices.size() != layers || layer_fractions.size() != layers) return false;
    return layers <= max_layers;
}

double StrategyState::avg_entry() const {
    double sum = 0.0;
    for (double p : entry_prices) sum += p;
    return entry_prices.empty() ? 0.0 : sum / static_cast<double>(entry_prices.size());
}

std::string to_string(Verb v) {
    switch (v) {
        case Verb::Buy: return "Buy";
        case Verb::Sell: return "Sell";
        case Verb::AddLayer: return "AddLayer";
        case Verb::Close: return "Close";
        default: return "Hold";
    }
}

SeriesCache::SeriesCache(const BarSeries& series, const StrategyParams& params)
    : series_(&series), params_(params) {
    std::vector<double> closes;
    closes.reserve(series.size());
    for (const auto& b : series.bars) closes.push_back(b.close);

    for (std::size_t n : {params.ma_cross.fast, params.ma_cross.slow, params.volume.ma_period,
                          params.atr.ma_period})
        if (!sma_.count(n)) sma_.emplace(n, indicators::sma(closes, n));
    for (std::size_t n : {params.ma_cross.atr_period, params.momentum.atr_period,
                          params.turtle.atr_period, params.boll.atr_period, params.rsi.atr_period,
                          params.kdj.atr_period, params.volume.atr_period, params.atr.atr_period})
        if (!atr_.count(n)) atr_.emplace(n, indicators::atr(series, n));
    for (std::size_t n : {params.turtle.entry_period, params.turtle.exit_period,
                          params.volume.price_window})
        if (!donchian_.count(n)) donchian_.emplace(n, indicators::donchian(series, n));

    rsi14_ = indicators::rsi(closes, params.rsi.period);
    boll_ = indicators::bollinger(closes, params.boll.period, params.boll.k);
    kdj_ = indicators::kdj(series, params.kdj.period);

    const std::size_t nv = params.volume.volume_window;
    volume_ratio_.name = "volume_ratio";
    volume_ratio_.first_valid = nv;
    volume_ratio_.values.assign(series.size(), kNan);
    for (std::size_t t = nv; t < series.size(); ++t) {
        double mean = 0.0;
        for (std::size_t i = t - nv; i < t; ++i) mean += series[i].volume;
        mean /= static_cast<double>(nv);
        volume_ratio_.values[t] = mean == 0.0 ? 0.0 : series[t].volume / mean;
    }
}

const indicators::IndicatorColumn& SeriesCache::sma(std::size_t n) const {
    auto it = sma_.find(n);
    if (it == sma_.end()) throw std::logic_error("SeriesCache: sma period not prepared");
    return it->second;
}

const indicators::IndicatorColumn& SeriesCache::atr(std::size_t n) const {
    auto it = atr_.find(n);
    if (it == atr_.end()) throw std::logic_error("SeriesCache: atr period not prepared");
    return it->second;
}

const indicators::DonchianChannel& SeriesCache::donchian(std::size_t n) const {
    auto it = donchian_.find(n);
    if (it == donchian_.end()) throw std::logic_error("SeriesCache: donchian period not prepared");
    return it->second;
}

double SeriesCache::price_return(std::size_t t, std::size_t k) const {
    return (*series_)[t].close / (*series_)[t - k].close - 1.0;
}

std::size_t warmup(ActionId a, const StrategyParams& p) {
    switch (a) {
        case ActionId::MACross:
            return std::max({p.ma_cross.slow + 4, p.ma_cross.atr_period + 1, std::size_t{6}});
        case ActionId::Momentum:
            return std::max({2 * p.momentum.lookback + 5, p.momentum.atr_period + 1,
                             p.rsi.period + 1});
        case ActionId::Turtle:
            return std::max({p.turtle.entry_period, p.turtle.exit_period, p.turtle.atr_period}) + 1;
        case ActionId::Boll:
            return std::max({p.boll.period, p.boll.atr_period + 1, p.rsi.period + 1,
                             std::size_t{6}});
        case ActionId::Rsi:
            return std::max({p.rsi.period + 11, p.rsi.atr_period + 1, std::size_t{6}});
        case ActionId::Kdj:
            return std::max({p.kdj.period + 10, p.kdj.atr_period + 1, std::size_t{6}});
        case ActionId::Volume:
            return std::max({p.volume.price_window, p.volume.atr_period, p.volume.ma_period,
                             p.volume.volume_window}) + 1;
        case ActionId::Atr:
            return std::max(p.atr.ma_period, p.atr.atr_period) + 6;
        default:
            return 0;
    }
}

namespace {

struct StepBuilder {
    StrategyState state;
    const SeriesCache& cache;
    std::size_t t;
    const StrategyParams& p;
    double price;

    StepBuilder(const StrategyState& s, const SeriesCache& c, std::size_t t_,
                const StrategyParams& p_)
        : state(s), cache(c), t(t_), p(p_), price(c.close(t_)) {}

    double entry_fraction(int confirmations) const {
        return std::min(1.0, p.base_entry_fraction +
                                 p.confirmation_increment * static_cast<double>(confirmations));
    }

    StepResult open(int direction, double fraction, std::optional<double> stop, std::string reason) {
        state.position = direction;
        state.layers = 1;
        state.entry_prices = {price};
        state.layer_fractions = {fraction};
        state.stop_level = stop;
        return {state, {direction > 0 ? Verb::Buy : Verb::Sell, fraction, std::move(reason)}};
    }

    StepResult add_layer(std::optional<double> stop, std::string reason) {
        const double fraction =
            state.layer_fractions.front() / static_cast<double>(state.layers + 1);
        state.layers += 1;
        state.entry_prices.push_back(price);
        state.layer_fractions.push_back(fraction);
        if (stop) state.stop_level = stop;
        return {state, {Verb::AddLayer, fraction, std::move(reason)}};
    }

    // Average entry if a layer were added at the current price.
    double avg_entry_after_add() const {
        double sum = price;
        for (double p_ : state.entry_prices) sum += p_;
        return sum / static_cast<double>(state.entry_prices.size() + 1);
    }

    StepResult close(std::string reason) {
        state = StrategyState{};
        return {state, {Verb::Close, 0.0, std::move(reason)}};
    }

    // Partial exit of the most recent layer (turtle take-profit).
    StepResult reduce_last(std::string reason) {
        const double fraction = state.layer_fractions.back();
        state.layers -= 1;
        state.entry_prices.pop_back();
        state.layer_fractions.pop_back();
        const Verb verb = state.position > 0 ? Verb::Sell : Verb::Buy;
        return {state, {verb, fraction, std::move(reason)}};
    }

    StepResult hold() { return {state, {Verb::Hold, 0.0, "hold"}}; }
};

// a1: dual moving-average state machine with trend-strength gating,
// volatility-scaled stops and pyramiding.
// Interpreted add-layer predicates (>= 2 must hold):
//   recent breakout  : close above the previous 5 closes (mirror: below)
//   ma convergence   : |MA_fast - MA_slow| / MA_slow shrinking for 3 bars
//   pullback         : bar touched the fast MA and closed back on trend side
StepResult step_ma_cross(const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.ma_cross;
    const auto& fast = c.sma(prm.fast);
    const auto& slow = c.sma(prm.slow);
    const double tau = c.price_return(t, 5);
    const double f0 = fast[t - 1], f1 = fast[t];
    const double s0 = slow[t - 1], s1 = slow[t];
    const bool golden = f0 <= s0 && f1 > s1;
    const bool death = f0 >= s0 && f1 < s1;
    const double strength = std::abs(f1 - s1) / s1;

    if (s.position == 0) {
        const bool strength_sig = strength > prm.trend_threshold;
        const bool momentum_sig = tau > 0.03;
        if (golden || strength_sig || momentum_sig) {
            const int conf = (golden ? 1 : 0) + (strength_sig ? 1 : 0) + (momentum_sig ? 1 : 0);
            return b.open(+1, b.entry_fraction(conf - 1), std::nullopt, "ma_cross_entry");
        }
        if (death && tau < -0.02) {
            const int conf = (strength_sig ? 1 : 0) + (tau < -0.03 ? 1 : 0);
            return b.open(-1, b.entry_fraction(conf), std::nullopt, "ma_cross_short");
        }
        return b.hold();
    }

    auto spread = [&](std::size_t i) { return std::abs(fast[i] - slow[i]) / slow[i]; };
    const bool converging = spread(t) < spread(t - 1) && spread(t - 1) < spread(t - 2);

    if (s.position > 0) {
        double mult = prm.atr_mult;
        if (tau > 0.05) mult *= 1.5;
        else if (tau > 0.02) mult *= 1.2;
        const double stop = s.avg_entry() - mult * c.atr(prm.atr_period)[t];
        if (b.price < stop && tau < -0.02) return b.close("stop");
        if (s.layers < prm.max_layers) {
            bool breakout = true;
            for (std::size_t i = t - 5; i < t; ++i) breakout = breakout && b.price > c.close(i);
            const bool pullback = c.series()[t].low < fast[t] && b.price > fast[t];
            if ((breakout ? 1 : 0) + (converging ? 1 : 0) + (pullback ? 1 : 0) >= 2)
                return b.add_layer(std::nullopt, "pyramid");
        }
        if (death && tau < -0.02) return b.close("death_cross");
        return b.hold();
    }

    // Symmetric short side.
    double mult = prm.atr_mult;
    if (tau < -0.05) mult *= 1.5;
    else if (tau < -0.02) mult *= 1.2;
    const double stop = s.avg_entry() + mult * c.atr(prm.atr_period)[t];
    if (b.price > stop && tau > 0.02) return b.close("stop");
    if (s.layers < prm.max_layers) {
        bool breakdown = true;
        for (std::size_t i = t - 5; i < t; ++i) breakdown = breakdown && b.price < c.close(i);
        const bool pullback = c.series()[t].high > fast[t] && b.price < fast[t];
        if ((breakdown ? 1 : 0) + (converging ? 1 : 0) + (pullback ? 1 : 0) >= 2)
            return b.add_layer(std::nullopt, "pyramid");
    }
    if (golden && tau > 0.02) return b.close("golden_cross");
    return b.hold();
}

// a2: blended momentum follower.
// momentum = 0.5 * r_10 + 0.3 * r_5 + 0.2 * r_20 (k-bar simple returns);
// acceleration = momentum(t) - momentum(t-5).
StepResult step_momentum(const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.momentum;
    const std::size_t mid = prm.lookback;
    auto blended = [&](std::size_t at) {
        return 0.5 * c.price_return(at, mid) + 0.3 * c.price_return(at, mid / 2) +
               0.2 * c.price_return(at, 2 * mid);
    };
    const double momentum = blended(t);
    const double accel = momentum - blended(t - 5);
    const double rsi = c.rsi14()[t];
    const double vol_ratio = c.volume_ratio()[t];

    if (s.position == 0) {
        if (momentum > prm.entry_threshold) {
            const int conf = (accel > 0.0 ? 1 : 0) + (rsi > prm.rsi_long ? 1 : 0) +
                             (vol_ratio > 1.2 ? 1 : 0);
            if (conf >= 2) return b.open(+1, b.entry_fraction(conf - 2), std::nullopt, "momentum_entry");
        } else if (momentum < -prm.entry_threshold && accel < 0.0 && rsi < prm.rsi_short) {
            const int conf = vol_ratio > 1.2 ? 1 : 0;
            return b.open(-1, b.entry_fraction(conf), std::nullopt, "momentum_short");
        }
        return b.hold();
    }

    const double atr = c.atr(prm.atr_period)[t];
    const double layers = static_cast<double>(s.layers);
    if (s.position > 0) {
        const double stop = s.avg_entry() - prm.atr_mult * atr;
        if (b.price < stop || momentum < prm.exit_threshold) return b.close("momentum_exit");
        if (s.layers < prm.max_layers) {
            const int met = (momentum > prm.entry_threshold * (1.0 + 0.5 * layers) ? 1 : 0) +
                            (b.price > s.avg_entry() * (1.0 + 0.01 * layers) ? 1 : 0) +
                            (accel > 0.5 * prm.entry_threshold ? 1 : 0) + (vol_ratio > 1.3 ? 1 : 0);
            if (met >= 2) return b.add_layer(std::nullopt, "pyramid");
        }
        return b.hold();
    }

    const double stop = s.avg_entry() + prm.atr_mult * atr;
    if (b.price > stop || momentum > -prm.exit_threshold) return b.close("momentum_exit");
    if (s.layers < prm.max_layers) {
        const int met = (momentum < -prm.entry_threshold * (1.0 + 0.5 * layers) ? 1 : 0) +
                        (b.price < s.avg_entry() * (1.0 - 0.01 * layers) ? 1 : 0) +
                        (accel < -0.5 * prm.entry_threshold ? 1 : 0) + (vol_ratio > 1.3 ? 1 : 0);
        if (met >= 2) return b.add_layer(std::nullopt, "pyramid");
    }
    return b.hold();
}

// a3: Donchian-channel breakout with unit pyramiding every half-ATR move
// and a partial take-profit once profit exceeds 10% with more than one unit.
StepResult step_turtle(const StrategyState& s, const SeriesCache& c, std::size_t t,
                       const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.turtle;
    const auto& entry_ch = c.donchian(prm.entry_period);
    const auto& exit_ch = c.donchian(prm.exit_period);
    const double atr = c.atr(prm.atr_period)[t];

    if (s.position == 0) {
        const double vol_ratio = c.volume_ratio()[t];
        const int conf = (vol_ratio > 1.2 ? 1 : 0) + (atr / b.price < 0.05 ? 1 : 0);
        if (b.price > entry_ch.highest_high[t])
            return b.open(+1, b.entry_fraction(conf), std::nullopt, "turtle_breakout");
        if (b.price < entry_ch.lowest_low[t])
            return b.open(-1, b.entry_fraction(conf), std::nullopt, "turtle_breakdown");
        return b.hold();
    }

    if (s.position > 0) {
        const double stop = s.avg_entry() - prm.atr_mult * atr;
        const double profit = b.price / s.avg_entry() - 1.0;
        if (profit > prm.take_profit && s.layers > 1) return b.reduce_last("partial_take_profit");
        if (b.price < exit_ch.lowest_low[t] || b.price < stop) return b.close("turtle_exit");
        if (s.layers < prm.max_units && b.price > s.entry_prices.back() + prm.pyramid_atr_step * atr)
            return b.add_layer(std::nullopt, "pyramid");
        return b.hold();
    }

    const double stop = s.avg_entry() + prm.atr_mult * atr;
    const double profit = 1.0 - b.price / s.avg_entry();
    if (profit > prm.take_profit && s.layers > 1) return b.reduce_last("partial_take_profit");
    if (b.price > exit_ch.highest_high[t] || b.price > stop) return b.close("turtle_exit");
    if (s.layers < prm.max_units && b.price < s.entry_prices.back() - prm.pyramid_atr_step * atr)
        return b.add_layer(std::nullopt, "pyramid");
    return b.hold();
}

// a4: band-touch mean reversion.
// Oversold/overbought confirmations (>= 2): RSI beyond 35/65, 5-bar return
// against the band side, volume ratio > 1.2. Adds only on a deeper extreme.
StepResult step_boll(const StrategyState& s, const SeriesCache& c, std::size_t t,
                     const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.boll;
    const auto& bands = c.boll();
    const double rsi = c.rsi14()[t];
    const double mom5 = c.price_return(t, 5);
    const double vol_ratio = c.volume_ratio()[t];

    if (s.position == 0) {
        if (b.price < bands.lower[t]) {
            const int conf = (rsi < 35.0 ? 1 : 0) + (mom5 < 0.0 ? 1 : 0) + (vol_ratio > 1.2 ? 1 : 0);
            if (conf >= 2) return b.open(+1, b.entry_fraction(conf - 2), std::nullopt, "band_reversion");
        } else if (b.price > bands.upper[t]) {
            const int conf = (rsi > 65.0 ? 1 : 0) + (mom5 > 0.0 ? 1 : 0) + (vol_ratio > 1.2 ? 1 : 0);
            if (conf >= 2) return b.open(-1, b.entry_fraction(conf - 2), std::nullopt, "band_reversion");
        }
        return b.hold();
    }

    const double atr = c.atr(prm.atr_period)[t];
    if (s.position > 0) {
        const double stop = s.avg_entry() - prm.atr_mult * atr;
        if (b.price > bands.middle[t] && mom5 < 0.0) return b.close("target");
        if (b.price < stop) return b.close("stop");
        if (s.layers < prm.max_layers && b.price < bands.lower[t] && b.price < min_entry(s))
            return b.add_layer(std::nullopt, "pyramid");
        return b.hold();
    }

    const double stop = s.avg_entry() + prm.atr_mult * atr;
    if (b.price < bands.middle[t] && mom5 > 0.0) return b.close("target");
    if (b.price > stop) return b.close("stop");
    if (s.layers < prm.max_layers && b.price > bands.upper[t] && b.price > max_entry(s))
        return b.add_layer(std::nullopt, "pyramid");
    return b.hold();
}

// a5: RSI swing reversal.
// RSI momentum = RSI(t) - RSI(t-3); divergence compares the close and the RSI
// against their previous-10-bar extremes.
StepResult step_rsi(const StrategyState& s, const SeriesCache& c, std::size_t t,
                    const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.rsi;
    const auto& rsi = c.rsi14();
    const double rsi_mom = rsi[t] - rsi[t - 3];
    const double mom5 = c.price_return(t, 5);
    const double vol_ratio = c.volume_ratio()[t];

    double low10 = std::numeric_limits<double>::infinity();
    double high10 = -std::numeric_limits<double>::infinity();
    double rsi_low10 = std::numeric_limits<double>::infinity();
    double rsi_high10 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = t - 10; i < t; ++i) {
        low10 = std::min(low10, c.close(i));
        high10 = std::max(high10, c.close(i));
        rsi_low10 = std::min(rsi_low10, rsi[i]);
        rsi_high10 = std::max(rsi_high10, rsi[i]);
    }
    const bool bullish_div = b.price < low10 && rsi[t] > rsi_low10;
    const bool bearish_div = b.price > high10 && rsi[t] < rsi_high10;

    if (s.position == 0) {
        if (rsi[t] < prm.oversold) {
            const int conf = (rsi_mom > 0.0 ? 1 : 0) + (mom5 < 0.0 ? 1 : 0) +
                             (vol_ratio > 1.5 ? 1 : 0) + (bullish_div ? 1 : 0);
            if (conf >= 2) return b.open(+1, b.entry_fraction(conf - 2), std::nullopt, "rsi_oversold");
        } else if (rsi[t] > prm.overbought && mom5 <= 0.0) {
            const int conf = (rsi_mom < 0.0 ? 1 : 0) + (vol_ratio > 1.5 ? 1 : 0) +
                             (bearish_div ? 1 : 0);
            return b.open(-1, b.entry_fraction(conf), std::nullopt, "rsi_overbought");
        }
        return b.hold();
    }

    const double atr = c.atr(prm.atr_period)[t];
    if (s.position > 0) {
        const double stop = s.avg_entry() - prm.atr_mult * atr;
        if (rsi[t] > prm.neutral && rsi_mom < 0.0) return b.close("mean_reversion");
        if (b.price < stop) return b.close("stop");
        if (b.price / s.avg_entry() - 1.0 > prm.profit_target && rsi[t] > 60.0)
            return b.close("profit_target");
        if (s.layers < prm.max_layers) {
            const int met = (rsi[t] < prm.oversold ? 1 : 0) + (bullish_div ? 1 : 0) +
                            (b.price < min_entry(s) ? 1 : 0);
            if (met >= 2) return b.add_layer(std::nullopt, "pyramid");
        }
        return b.hold();
    }

    const double stop = s.avg_entry() + prm.atr_mult * atr;
    if (rsi[t] < prm.neutral && rsi_mom > 0.0) return b.close("mean_reversion");
    if (b.price > stop) return b.close("stop");
    if (1.0 - b.price / s.avg_entry() > prm.profit_target && rsi[t] < 40.0)
        return b.close("profit_target");
    if (s.layers < prm.max_layers) {
        const int met = (rsi[t] > prm.overbought ? 1 : 0) + (bearish_div ? 1 : 0) +
                        (b.price > max_entry(s) ? 1 : 0);
        if (met >= 2) return b.add_layer(std::nullopt, "pyramid");
    }
    return b.hold();
}

// a6: stochastic-oscillator reversal. J momentum = J(t) - J(t-1);
// golden/death crosses are K/D crossovers at t.
StepResult step_kdj(const StrategyState& s, const SeriesCache& c, std::size_t t,
                    const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.kdj;
    const auto& kdj = c.kdj();
    const double k = kdj.k[t], d = kdj.d[t], j = kdj.j[t];
    const bool golden = kdj.k[t - 1] <= kdj.d[t - 1] && k > d;
    const bool death = kdj.k[t - 1] >= kdj.d[t - 1] && k < d;
    const double j_mom = j - kdj.j[t - 1];
    const double mom5 = c.price_return(t, 5);
    const double vol_ratio = c.volume_ratio()[t];

    if (s.position == 0) {
        if (j < prm.j_buy || k < prm.k_buy) {
            const int conf = (golden ? 1 : 0) + (vol_ratio > 1.2 ? 1 : 0) + (mom5 > 0.0 ? 1 : 0);
            if (conf >= 2) return b.open(+1, b.entry_fraction(conf - 2), std::nullopt, "kdj_oversold");
        } else if (j > prm.j_sell && k > prm.k_sell &&
                   (death || (mom5 < 0.0 && vol_ratio > 1.2))) {
            const int conf = (death ? 1 : 0) + (mom5 < 0.0 ? 1 : 0);
            return b.open(-1, b.entry_fraction(conf - 1), std::nullopt, "kdj_overbought");
        }
        return b.hold();
    }

    const double atr = c.atr(prm.atr_period)[t];
    if (s.position > 0) {
        const double stop = s.avg_entry() - prm.atr_mult * atr;
        if (death && k > 70.0) return b.close("death_cross");
        if (j > 80.0 && j_mom < -10.0) return b.close("j_reversion");
        if (b.price < stop) return b.close("stop");
        if (b.price / s.avg_entry() - 1.0 > prm.profit_target && (j > 70.0 || k > 70.0))
            return b.close("profit_target");
        if (s.layers < prm.max_layers) {
            const int met = (j < prm.j_buy ? 1 : 0) + (golden ? 1 : 0) +
                            (b.price < min_entry(s) ? 1 : 0);
            if (met >= 2) return b.add_layer(std::nullopt, "pyramid");
        }
        return b.hold();
    }

    const double stop = s.avg_entry() + prm.atr_mult * atr;
    if (golden && k < 30.0) return b.close("golden_cross");
    if (j < 20.0 && j_mom > 10.0) return b.close("j_reversion");
    if (b.price > stop) return b.close("stop");
    if (1.0 - b.price / s.avg_entry() > prm.profit_target && (j < 30.0 || k < 30.0))
        return b.close("profit_target");
    if (s.layers < prm.max_layers) {
        const int met = (j > prm.j_sell ? 1 : 0) + (death ? 1 : 0) +
                        (b.price > max_entry(s) ? 1 : 0);
        if (met >= 2) return b.add_layer(std::nullopt, "pyramid");
    }
    return b.hold();
}

// a7: price breakout confirmed by volume. The stop is cached at entry and
// refreshed on adds; volume exhaustion (ratio < 0.7) forces an exit.
StepResult step_volume(const StrategyState& s, const SeriesCache& c, std::size_t t,
                       const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.volume;
    const auto& channel = c.donchian(prm.price_window);
    const double vol_ratio = c.volume_ratio()[t];
    const double atr = c.atr(prm.atr_period)[t];

    if (s.position == 0) {
        const int conf = (vol_ratio > 2.0 ? 1 : 0) +
                         (b.price > c.sma(prm.ma_period)[t] ? 1 : 0) +
                         (b.price > c.series()[t].open ? 1 : 0);
        if (b.price > channel.highest_high[t] && vol_ratio > prm.volume_mult)
            return b.open(+1, b.entry_fraction(std::min(conf, 2)),
                          b.price - prm.atr_mult * atr, "volume_breakout");
        if (b.price < channel.lowest_low[t] && vol_ratio > prm.volume_mult)
            return b.open(-1, b.entry_fraction(std::min(conf, 2)),
                          b.price + prm.atr_mult * atr, "volume_breakdown");
        return b.hold();
    }

    if (s.position > 0) {
        if (b.price < *s.stop_level || vol_ratio < prm.exhaustion_ratio)
            return b.close(b.price < *s.stop_level ? "stop" : "exhaustion");
        if (s.layers < prm.max_layers && b.price > channel.highest_high[t] &&
            vol_ratio > prm.volume_mult)
            return b.add_layer(b.avg_entry_after_add() - prm.atr_mult * atr, "pyramid");
        return b.hold();
    }

    if (b.price > *s.stop_level || vol_ratio < prm.exhaustion_ratio)
        return b.close(b.price > *s.stop_level ? "stop" : "exhaustion");
    if (s.layers < prm.max_layers && b.price < channel.lowest_low[t] &&
        vol_ratio > prm.volume_mult)
        return b.add_layer(b.avg_entry_after_add() + prm.atr_mult * atr, "pyramid");
    return b.hold();
}

// a8: volatility-channel breakout: entry above MA + 1.5*ATR, exit when the
// price falls back through MA + 0.75*ATR, stop cached at entry - 1.2*ATR.
// All channel comparisons are strict, so touching a band is not a signal.
StepResult step_atr_breakout(const StrategyState& s, const SeriesCache& c, std::size_t t,
                             const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    const auto& prm = p.atr;
    const double ma = c.sma(prm.ma_period)[t];
    const double atr = c.atr(prm.atr_period)[t];
    const double upper = ma + prm.entry_mult * atr;
    const double lower = ma - prm.entry_mult * atr;

    if (s.position == 0) {
        const int conf = (c.volume_ratio()[t] > 1.2 ? 1 : 0) +
                         (atr > c.atr(prm.atr_period)[t - 5] ? 1 : 0);
        if (b.price > upper)
            return b.open(+1, b.entry_fraction(conf), b.price - prm.stop_mult * atr, "atr_breakout");
        if (b.price < lower)
            return b.open(-1, b.entry_fraction(conf), b.price + prm.stop_mult * atr, "atr_breakdown");
        return b.hold();
    }

    if (s.position > 0) {
        const double exit_level = ma + prm.exit_mult * atr;
        if (b.price < *s.stop_level || b.price < exit_level)
            return b.close(b.price < *s.stop_level ? "stop" : "channel_exit");
        if (s.layers < prm.max_layers && b.price > upper)
            return b.add_layer(b.avg_entry_after_add() - prm.stop_mult * atr, "pyramid");
        return b.hold();
    }

    const double exit_level = ma - prm.exit_mult * atr;
    if (b.price > *s.stop_level || b.price > exit_level)
        return b.close(b.price > *s.stop_level ? "stop" : "channel_exit");
    if (s.layers < prm.max_layers && b.price < lower)
        return b.add_layer(b.avg_entry_after_add() + prm.stop_mult * atr, "pyramid");
    return b.hold();
}

StepResult step_long_only(const StrategyState& s, const SeriesCache& c, std::size_t t,
                          const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    if (s.position == 0) return b.open(+1, p.position.long_fraction, std::nullopt, "long_only");
    return b.hold();
}

StepResult step_short_only(const StrategyState& s, const SeriesCache& c, std::size_t t,
                           const StrategyParams& p) {
    StepBuilder b(s, c, t, p);
    if (s.position == 0) return b.open(-1, p.position.short_fraction, std::nullopt, "short_only");
    return b.hold();
}

StepResult step_cash(const StrategyState& s, const SeriesCache& c, std::size_t t,
                     const StrategyParams& p) {
    return StepBuilder(s, c, t, p).hold();
}

}  // namespace

StepResult strategy_step(ActionId a, const StrategyState& state, const SeriesCache& cache,
                         std::size_t t, const StrategyParams& params) {
    if (t < warmup(a, params))
        throw std::invalid_argument("strategy_step: t=" + std::to_string(t) +
                                    " inside warm-up for " + to_string(a));
    switch (a) {
        case ActionId::MACross: return step_ma_cross(state, cache, t, params);
        case ActionId::Momentum: return step_momentum(state, cache, t, params);
        case ActionId::Turtle: return step_turtle(state, cache, t, params);
        case ActionId::Boll: return step_boll(state, cache, t, params);
        case ActionId::Rsi: return step_rsi(state, cache, t, params);
        case ActionId::Kdj: return step_kdj(state, cache, t, params);
        case ActionId::Volume: return step_volume(state, cache, t, params);
        case ActionId::Atr: return step_atr_breakout(state, cache, t, params);
        case ActionId::LongOnly: return step_long_only(state, cache, t, params);
        case ActionId::ShortOnly: return step_short_only(state, cache, t, params);
        case ActionId::Cash: return step_cash(state, cache, t, params);
    }
    throw std::invalid_argument("strategy_step: unknown action id");
}

namespace {

StepResult family_step(ExpertFamily f, ActionId a, const StrategyState& s, const SeriesCache& c,
                       std::size_t t, const StrategyParams& p) {
    if (family_of(a) != f)
        throw std::invalid_argument("action " + to_string(a) + " does not belong to the " +
                                    to_string(f) + " family");
    return strategy_step(a, s, c, t, p);
}

}  // namespace

StepResult trend_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                      const StrategyParams& p) {
    return family_step(ExpertFamily::Trend, a, s, c, t, p);
}

StepResult reversal_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p) {
    return family_step(ExpertFamily::Reversal, a, s, c, t, p);
}

StepResult breakout_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p) {
    return family_step(ExpertFamily::Breakout, a, s, c, t, p);
}

StepResult position_step(ActionId a, const StrategyState& s, const SeriesCache& c, std::size_t t,
                         const StrategyParams& p) {
    return family_step(ExpertFamily::Position, a, s, c, t, p);
}

}  // namespace mixbt::strategy

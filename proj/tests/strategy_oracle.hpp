// Line-by-line simulation oracle for the adaptive strategies: an independent
// re-implementation of each documented state machine over brute-force
// indicators (oracles.hpp), with the engine's zero-fee portfolio arithmetic
// restated. Used to check run_strategy traces bit for bit.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixbt/market_data.hpp"

#include "oracles.hpp"

namespace strategy_oracle {

using mixbt::market_data::BarSeries;

struct TraceRow {
    std::size_t t = 0;
    std::string verb;      // Buy / Sell / AddLayer / Close / Hold
    double fraction = 0.0;
    double equity = 0.0;   // marked at close after the action
};

struct Trace {
    std::vector<TraceRow> rows;
};

namespace detail {

struct Sim {
    const BarSeries& series;
    std::vector<oracles::OhlcRow> bars;
    std::vector<double> closes;
    std::vector<double> vol_ratio;

    // position machine
    int position = 0;
    std::vector<double> entries;
    std::vector<double> fractions;
    std::optional<double> cached_stop;

    // zero-fee portfolio
    double cash = 100000.0;
    double shares = 0.0;

    Trace trace;

    explicit Sim(const BarSeries& s) : series(s) {
        for (const auto& b : s.bars) {
            bars.push_back({b.open, b.high, b.low, b.close, b.volume});
            closes.push_back(b.close);
        }
        vol_ratio.assign(s.size(), oracles::kNaN);
        for (std::size_t t = 5; t < s.size(); ++t) {
            double m = 0.0;
            for (std::size_t i = t - 5; i < t; ++i) m += bars[i].volume;
            m /= 5.0;
            vol_ratio[t] = m == 0.0 ? 0.0 : bars[t].volume / m;
        }
    }

    double equity(double price) const { return cash + shares * price; }
    double avg_entry() const {
        double s = 0.0;
        for (double e : entries) s += e;
        return s / static_cast<double>(entries.size());
    }
    double min_entry() const {
        double m = entries.front();
        for (double e : entries) m = std::min(m, e);
        return m;
    }
    double max_entry() const {
        double m = entries.front();
        for (double e : entries) m = std::max(m, e);
        return m;
    }
    std::size_t layers() const { return entries.size(); }

    double entry_fraction(int confirmations) const {
        return std::min(1.0, 0.5 + 0.25 * static_cast<double>(confirmations));
    }

    // mirrors the engine: requests above available cash fill partially
    double fill_long(double requested, double price) {
        const double eq = equity(price);
        if (eq <= 0.0) return 0.0;
        double fraction = requested;
        const double requested_notional = requested * eq;
        if (requested_notional > cash) fraction = std::max(0.0, cash / eq);
        if (fraction <= 0.0) return 0.0;
        const double notional = fraction * eq;
        shares += notional / price;
        cash -= notional;
        return fraction;
    }

    void fill_short(double fraction, double price) {
        const double notional = fraction * equity(price);
        shares -= notional / price;
        cash += notional;
    }

    void close_all(double price) {
        if (shares > 0.0) cash += shares * price;
        else if (shares < 0.0) cash -= -shares * price;
        shares = 0.0;
    }

    void reduce(double fraction, double price) {   // partial exit toward flat
        const double eq = equity(price);
        if (position > 0) {
            const double want = std::min(fraction * eq, shares * price);
            cash += want;
            shares -= want / price;
        } else {
            const double want = std::min(fraction * eq, -shares * price);
            cash -= want;
            shares += want / price;
        }
    }

    void emit(std::size_t t, const std::string& verb, double fraction) {
        trace.rows.push_back({t, verb, fraction, equity(closes[t])});
    }

    void open(std::size_t t, int dir, double requested, std::optional<double> stop) {
        const double price = closes[t];
        double filled = requested;
        if (dir > 0) {
            filled = fill_long(requested, price);
            if (filled <= 0.0) {
                emit(t, "Hold", 0.0);
                return;
            }
        } else {
            fill_short(requested, price);
        }
        position = dir;
        entries = {price};
        fractions = {filled};
        cached_stop = stop;
        emit(t, dir > 0 ? "Buy" : "Sell", filled);
    }

    void add(std::size_t t, std::optional<double> stop) {
        const double price = closes[t];
        const double requested = fractions.front() / static_cast<double>(layers() + 1);
        double filled = requested;
        if (position > 0) {
            filled = fill_long(requested, price);
            if (filled <= 0.0) {
                emit(t, "Hold", 0.0);
                return;
            }
        } else {
            fill_short(requested, price);
        }
        entries.push_back(price);
        fractions.push_back(filled);
        if (stop) cached_stop = stop;
        emit(t, "AddLayer", filled);
    }

    void close(std::size_t t) {
        close_all(closes[t]);
        position = 0;
        entries.clear();
        fractions.clear();
        cached_stop.reset();
        emit(t, "Close", 0.0);
    }

    void take_profit_layer(std::size_t t) {
        const double f = fractions.back();
        reduce(f, closes[t]);
        entries.pop_back();
        fractions.pop_back();
        emit(t, position > 0 ? "Sell" : "Buy", f);
    }

    void hold(std::size_t t) { emit(t, "Hold", 0.0); }

    void finish_bar(std::size_t t, bool last) {
        if (last) {
            if (position != 0) close(t);
            else hold(t);
        }
    }

    double avg_after_add(double price) const {
        double s = price;
        for (double e : entries) s += e;
        return s / static_cast<double>(entries.size() + 1);
    }
};

}  // namespace detail

// a1: dual-MA crossover with trend-strength gating.
inline Trace ma_cross(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto fast = oracles::sma(s.closes, 5);
    const auto slow = oracles::sma(s.closes, 20);
    const auto atr = oracles::atr_mean(s.bars, 14);

    for (std::size_t t = begin; t < end; ++t) {
        const bool last = t + 1 == end;
        if (last) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        const double tau = price / s.closes[t - 5] - 1.0;
        const bool golden = fast[t - 1] <= slow[t - 1] && fast[t] > slow[t];
        const bool death = fast[t - 1] >= slow[t - 1] && fast[t] < slow[t];
        const double strength = std::abs(fast[t] - slow[t]) / slow[t];

        if (s.position == 0) {
            const bool strength_sig = strength > 0.02;
            const bool momentum_sig = tau > 0.03;
            if (golden || strength_sig || momentum_sig) {
                const int conf = (golden ? 1 : 0) + (strength_sig ? 1 : 0) + (momentum_sig ? 1 : 0);
                s.open(t, +1, s.entry_fraction(conf - 1), std::nullopt);
            } else if (death && tau < -0.02) {
                const int conf = (strength_sig ? 1 : 0) + (tau < -0.03 ? 1 : 0);
                s.open(t, -1, s.entry_fraction(conf), std::nullopt);
            } else {
                s.hold(t);
            }
            continue;
        }

        auto spread = [&](std::size_t i) { return std::abs(fast[i] - slow[i]) / slow[i]; };
        const bool converging = spread(t) < spread(t - 1) && spread(t - 1) < spread(t - 2);

        if (s.position > 0) {
            double mult = 1.5;
            if (tau > 0.05) mult *= 1.5;
            else if (tau > 0.02) mult *= 1.2;
            const double stop = s.avg_entry() - mult * atr[t];
            if (price < stop && tau < -0.02) {
                s.close(t);
                continue;
            }
            if (s.layers() < 4) {
                bool breakout = true;
                for (std::size_t i = t - 5; i < t; ++i) breakout = breakout && price > s.closes[i];
                const bool pullback = series[t].low < fast[t] && price > fast[t];
                if ((breakout ? 1 : 0) + (converging ? 1 : 0) + (pullback ? 1 : 0) >= 2) {
                    s.add(t, std::nullopt);
                    continue;
                }
            }
            if (death && tau < -0.02) {
                s.close(t);
                continue;
            }
            s.hold(t);
        } else {
            double mult = 1.5;
            if (tau < -0.05) mult *= 1.5;
            else if (tau < -0.02) mult *= 1.2;
            const double stop = s.avg_entry() + mult * atr[t];
            if (price > stop && tau > 0.02) {
                s.close(t);
                continue;
            }
            if (s.layers() < 4) {
                bool breakdown = true;
                for (std::size_t i = t - 5; i < t; ++i) breakdown = breakdown && price < s.closes[i];
                const bool pullback = series[t].high > fast[t] && price < fast[t];
                if ((breakdown ? 1 : 0) + (converging ? 1 : 0) + (pullback ? 1 : 0) >= 2) {
                    s.add(t, std::nullopt);
                    continue;
                }
            }
            if (golden && tau > 0.02) {
                s.close(t);
                continue;
            }
            s.hold(t);
        }
    }
    return s.trace;
}

// a2: blended momentum with >=2-of confirmation gates.
inline Trace momentum(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto rsi = oracles::rsi_wilder(s.closes, 14);
    const auto atr = oracles::atr_mean(s.bars, 14);
    auto blended = [&](std::size_t at) {
        const auto r = [&](std::size_t k) { return s.closes[at] / s.closes[at - k] - 1.0; };
        return 0.5 * r(10) + 0.3 * r(5) + 0.2 * r(20);
    };

    for (std::size_t t = begin; t < end; ++t) {
        if (t + 1 == end) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        const double mom = blended(t);
        const double accel = mom - blended(t - 5);
        const double vr = s.vol_ratio[t];

        if (s.position == 0) {
            if (mom > 0.02) {
                const int conf =
                    (accel > 0.0 ? 1 : 0) + (rsi[t] > 50.0 ? 1 : 0) + (vr > 1.2 ? 1 : 0);
                if (conf >= 2) {
                    s.open(t, +1, s.entry_fraction(conf - 2), std::nullopt);
                    continue;
                }
            } else if (mom < -0.02 && accel < 0.0 && rsi[t] < 40.0) {
                s.open(t, -1, s.entry_fraction(vr > 1.2 ? 1 : 0), std::nullopt);
                continue;
            }
            s.hold(t);
            continue;
        }

        const double L = static_cast<double>(s.layers());
        if (s.position > 0) {
            const double stop = s.avg_entry() - 1.5 * atr[t];
            if (price < stop || mom < 0.005) {
                s.close(t);
                continue;
            }
            if (s.layers() < 3) {
                const int met = (mom > 0.02 * (1.0 + 0.5 * L) ? 1 : 0) +
                                (price > s.avg_entry() * (1.0 + 0.01 * L) ? 1 : 0) +
                                (accel > 0.5 * 0.02 ? 1 : 0) + (vr > 1.3 ? 1 : 0);
                if (met >= 2) {
                    s.add(t, std::nullopt);
                    continue;
                }
            }
            s.hold(t);
        } else {
            const double stop = s.avg_entry() + 1.5 * atr[t];
            if (price > stop || mom > -0.005) {
                s.close(t);
                continue;
            }
            if (s.layers() < 3) {
                const int met = (mom < -0.02 * (1.0 + 0.5 * L) ? 1 : 0) +
                                (price < s.avg_entry() * (1.0 - 0.01 * L) ? 1 : 0) +
                                (accel < -0.5 * 0.02 ? 1 : 0) + (vr > 1.3 ? 1 : 0);
                if (met >= 2) {
                    s.add(t, std::nullopt);
                    continue;
                }
            }
            s.hold(t);
        }
    }
    return s.trace;
}

// a3: Donchian breakout, half-ATR pyramids, 10% partial take-profit.
inline Trace turtle(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto atr = oracles::atr_mean(s.bars, 20);
    auto channel = [&](std::size_t t, std::size_t n, bool high) {
        double hh = -1e300, ll = 1e300;
        for (std::size_t i = t - n; i < t; ++i) {
            hh = std::max(hh, s.bars[i].high);
            ll = std::min(ll, s.bars[i].low);
        }
        return high ? hh : ll;
    };

    for (std::size_t t = begin; t < end; ++t) {
        if (t + 1 == end) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        if (s.position == 0) {
            const int conf = (s.vol_ratio[t] > 1.2 ? 1 : 0) + (atr[t] / price < 0.05 ? 1 : 0);
            if (price > channel(t, 20, true)) s.open(t, +1, s.entry_fraction(conf), std::nullopt);
            else if (price < channel(t, 20, false))
                s.open(t, -1, s.entry_fraction(conf), std::nullopt);
            else s.hold(t);
            continue;
        }

        if (s.position > 0) {
            const double stop = s.avg_entry() - 2.0 * atr[t];
            const double profit = price / s.avg_entry() - 1.0;
            if (profit > 0.10 && s.layers() > 1) {
                s.take_profit_layer(t);
                continue;
            }
            if (price < channel(t, 10, false) || price < stop) {
                s.close(t);
                continue;
            }
            if (s.layers() < 5 && price > s.entries.back() + 0.5 * atr[t]) {
                s.add(t, std::nullopt);
                continue;
            }
            s.hold(t);
        } else {
            const double stop = s.avg_entry() + 2.0 * atr[t];
            const double profit = 1.0 - price / s.avg_entry();
            if (profit > 0.10 && s.layers() > 1) {
                s.take_profit_layer(t);
                continue;
            }
            if (price > channel(t, 10, true) || price > stop) {
                s.close(t);
                continue;
            }
            if (s.layers() < 5 && price < s.entries.back() - 0.5 * atr[t]) {
                s.add(t, std::nullopt);
                continue;
            }
            s.hold(t);
        }
    }
    return s.trace;
}

// a4: Bollinger band reversion.
inline Trace boll(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto rsi = oracles::rsi_wilder(s.closes, 14);
    const auto atr = oracles::atr_mean(s.bars, 14);

    for (std::size_t t = begin; t < end; ++t) {
        if (t + 1 == end) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        const double mid = oracles::window_mean(s.closes, t, 20);
        const double sd = oracles::window_std(s.closes, t, 20, 0);
        const double upper = mid + 1.8 * sd;
        const double lower = mid - 1.8 * sd;
        const double mom5 = price / s.closes[t - 5] - 1.0;
        const double vr = s.vol_ratio[t];

        if (s.position == 0) {
            if (price < lower) {
                const int conf =
                    (rsi[t] < 35.0 ? 1 : 0) + (mom5 < 0.0 ? 1 : 0) + (vr > 1.2 ? 1 : 0);
                if (conf >= 2) {
                    s.open(t, +1, s.entry_fraction(conf - 2), std::nullopt);
                    continue;
                }
            } else if (price > upper) {
                const int conf =
                    (rsi[t] > 65.0 ? 1 : 0) + (mom5 > 0.0 ? 1 : 0) + (vr > 1.2 ? 1 : 0);
                if (conf >= 2) {
                    s.open(t, -1, s.entry_fraction(conf - 2), std::nullopt);
                    continue;
                }
            }
            s.hold(t);
            continue;
        }

        if (s.position > 0) {
            const double stop = s.avg_entry() - 1.8 * atr[t];
            if (price > mid && mom5 < 0.0) s.close(t);
            else if (price < stop) s.close(t);
            else if (s.layers() < 3 && price < lower && price < s.min_entry()) s.add(t, std::nullopt);
            else s.hold(t);
        } else {
            const double stop = s.avg_entry() + 1.8 * atr[t];
            if (price < mid && mom5 > 0.0) s.close(t);
            else if (price > stop) s.close(t);
            else if (s.layers() < 3 && price > upper && price > s.max_entry()) s.add(t, std::nullopt);
            else s.hold(t);
        }
    }
    return s.trace;
}

// a5: RSI swing reversal.
inline Trace rsi_reversion(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto rsi = oracles::rsi_wilder(s.closes, 14);
    const auto atr = oracles::atr_mean(s.bars, 14);

    for (std::size_t t = begin; t < end; ++t) {
        if (t + 1 == end) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        const double rsi_mom = rsi[t] - rsi[t - 3];
        const double mom5 = price / s.closes[t - 5] - 1.0;
        const double vr = s.vol_ratio[t];
        double low10 = 1e300, high10 = -1e300, rlow10 = 1e300, rhigh10 = -1e300;
        for (std::size_t i = t - 10; i < t; ++i) {
            low10 = std::min(low10, s.closes[i]);
            high10 = std::max(high10, s.closes[i]);
            rlow10 = std::min(rlow10, rsi[i]);
            rhigh10 = std::max(rhigh10, rsi[i]);
        }
        const bool bull_div = price < low10 && rsi[t] > rlow10;
        const bool bear_div = price > high10 && rsi[t] < rhigh10;

        if (s.position == 0) {
            if (rsi[t] < 35.0) {
                const int conf = (rsi_mom > 0.0 ? 1 : 0) + (mom5 < 0.0 ? 1 : 0) +
                                 (vr > 1.5 ? 1 : 0) + (bull_div ? 1 : 0);
                if (conf >= 2) {
                    s.open(t, +1, s.entry_fraction(conf - 2), std::nullopt);
                    continue;
                }
            } else if (rsi[t] > 65.0 && mom5 <= 0.0) {
                const int conf =
                    (rsi_mom < 0.0 ? 1 : 0) + (vr > 1.5 ? 1 : 0) + (bear_div ? 1 : 0);
                s.open(t, -1, s.entry_fraction(conf), std::nullopt);
                continue;
            }
            s.hold(t);
            continue;
        }

        if (s.position > 0) {
            const double stop = s.avg_entry() - 1.8 * atr[t];
            if (rsi[t] > 50.0 && rsi_mom < 0.0) s.close(t);
            else if (price < stop) s.close(t);
            else if (price / s.avg_entry() - 1.0 > 0.08 && rsi[t] > 60.0) s.close(t);
            else if (s.layers() < 3 &&
                     (rsi[t] < 35.0 ? 1 : 0) + (bull_div ? 1 : 0) +
                             (price < s.min_entry() ? 1 : 0) >= 2)
                s.add(t, std::nullopt);
            else s.hold(t);
        } else {
            const double stop = s.avg_entry() + 1.8 * atr[t];
            if (rsi[t] < 50.0 && rsi_mom > 0.0) s.close(t);
            else if (price > stop) s.close(t);
            else if (1.0 - price / s.avg_entry() > 0.08 && rsi[t] < 40.0) s.close(t);
            else if (s.layers() < 3 &&
                     (rsi[t] > 65.0 ? 1 : 0) + (bear_div ? 1 : 0) +
                             (price > s.max_entry() ? 1 : 0) >= 2)
                s.add(t, std::nullopt);
            else s.hold(t);
        }
    }
    return s.trace;
}

// a6: KDJ oscillator reversal.
inline Trace kdj_reversion(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto kdj = oracles::kdj(s.bars, 9);
    const auto atr = oracles::atr_mean(s.bars, 14);

    for (std::size_t t = begin; t < end; ++t) {
        if (t + 1 == end) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        const double k = kdj.k[t], d = kdj.d[t], j = kdj.j[t];
        const bool golden = kdj.k[t - 1] <= kdj.d[t - 1] && k > d;
        const bool death = kdj.k[t - 1] >= kdj.d[t - 1] && k < d;
        const double j_mom = j - kdj.j[t - 1];
        const double mom5 = price / s.closes[t - 5] - 1.0;
        const double vr = s.vol_ratio[t];

        if (s.position == 0) {
            if (j < 10.0 || k < 20.0) {
                const int conf = (golden ? 1 : 0) + (vr > 1.2 ? 1 : 0) + (mom5 > 0.0 ? 1 : 0);
                if (conf >= 2) {
                    s.open(t, +1, s.entry_fraction(conf - 2), std::nullopt);
                    continue;
                }
            } else if (j > 90.0 && k > 80.0 && (death || (mom5 < 0.0 && vr > 1.2))) {
                const int conf = (death ? 1 : 0) + (mom5 < 0.0 ? 1 : 0);
                s.open(t, -1, s.entry_fraction(conf - 1), std::nullopt);
                continue;
            }
            s.hold(t);
            continue;
        }

        if (s.position > 0) {
            const double stop = s.avg_entry() - 1.8 * atr[t];
            if (death && k > 70.0) s.close(t);
            else if (j > 80.0 && j_mom < -10.0) s.close(t);
            else if (price < stop) s.close(t);
            else if (price / s.avg_entry() - 1.0 > 0.08 && (j > 70.0 || k > 70.0)) s.close(t);
            else if (s.layers() < 3 &&
                     (j < 10.0 ? 1 : 0) + (golden ? 1 : 0) + (price < s.min_entry() ? 1 : 0) >= 2)
                s.add(t, std::nullopt);
            else s.hold(t);
        } else {
            const double stop = s.avg_entry() + 1.8 * atr[t];
            if (golden && k < 30.0) s.close(t);
            else if (j < 20.0 && j_mom > 10.0) s.close(t);
            else if (price > stop) s.close(t);
            else if (1.0 - price / s.avg_entry() > 0.08 && (j < 30.0 || k < 30.0)) s.close(t);
            else if (s.layers() < 3 &&
                     (j > 90.0 ? 1 : 0) + (death ? 1 : 0) + (price > s.max_entry() ? 1 : 0) >= 2)
                s.add(t, std::nullopt);
            else s.hold(t);
        }
    }
    return s.trace;
}

// a7: price breakout confirmed by volume; cached stop; exhaustion exit.
inline Trace volume_breakout(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto atr = oracles::atr_mean(s.bars, 14);
    const auto ma10 = oracles::sma(s.closes, 10);
    auto channel = [&](std::size_t t, bool high) {
        double hh = -1e300, ll = 1e300;
        for (std::size_t i = t - 20; i < t; ++i) {
            hh = std::max(hh, s.bars[i].high);
            ll = std::min(ll, s.bars[i].low);
        }
        return high ? hh : ll;
    };

    for (std::size_t t = begin; t < end; ++t) {
        if (t + 1 == end) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        const double vr = s.vol_ratio[t];

        if (s.position == 0) {
            const int conf = std::min((vr > 2.0 ? 1 : 0) + (price > ma10[t] ? 1 : 0) +
                                          (price > s.bars[t].open ? 1 : 0),
                                      2);
            if (price > channel(t, true) && vr > 1.5)
                s.open(t, +1, s.entry_fraction(conf), price - 1.8 * atr[t]);
            else if (price < channel(t, false) && vr > 1.5)
                s.open(t, -1, s.entry_fraction(conf), price + 1.8 * atr[t]);
            else s.hold(t);
            continue;
        }

        if (s.position > 0) {
            if (price < *s.cached_stop || vr < 0.7) s.close(t);
            else if (s.layers() < 3 && price > channel(t, true) && vr > 1.5)
                s.add(t, s.avg_after_add(price) - 1.8 * atr[t]);
            else s.hold(t);
        } else {
            if (price > *s.cached_stop || vr < 0.7) s.close(t);
            else if (s.layers() < 3 && price < channel(t, false) && vr > 1.5)
                s.add(t, s.avg_after_add(price) + 1.8 * atr[t]);
            else s.hold(t);
        }
    }
    return s.trace;
}

// a8: ATR channel breakout with a pull-back exit channel.
inline Trace atr_breakout(const BarSeries& series, std::size_t begin, std::size_t end) {
    detail::Sim s(series);
    const auto atr = oracles::atr_mean(s.bars, 20);
    const auto ma = oracles::sma(s.closes, 20);

    for (std::size_t t = begin; t < end; ++t) {
        if (t + 1 == end) {
            s.finish_bar(t, true);
            break;
        }
        const double price = s.closes[t];
        const double upper = ma[t] + 1.5 * atr[t];
        const double lower = ma[t] - 1.5 * atr[t];

        if (s.position == 0) {
            const int conf = (s.vol_ratio[t] > 1.2 ? 1 : 0) + (atr[t] > atr[t - 5] ? 1 : 0);
            if (price > upper) s.open(t, +1, s.entry_fraction(conf), price - 1.2 * atr[t]);
            else if (price < lower) s.open(t, -1, s.entry_fraction(conf), price + 1.2 * atr[t]);
            else s.hold(t);
            continue;
        }

        if (s.position > 0) {
            if (price < *s.cached_stop || price < ma[t] + 0.75 * atr[t]) s.close(t);
            else if (s.layers() < 3 && price > upper)
                s.add(t, s.avg_after_add(price) - 1.2 * atr[t]);
            else s.hold(t);
        } else {
            if (price > *s.cached_stop || price > ma[t] - 0.75 * atr[t]) s.close(t);
            else if (s.layers() < 3 && price < lower)
                s.add(t, s.avg_after_add(price) + 1.2 * atr[t]);
            else s.hold(t);
        }
    }
    return s.trace;
}

}  // namespace strategy_oracle

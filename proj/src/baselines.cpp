#include "mixbt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mixbt/indicators.hpp"

namespace mixbt::baselines {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : x < 0.0 ? -1 : 0; }

std::vector<double> closes_of(const BarSeries& series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& b : series.bars) out.push_back(b.close);
    return out;
}

}  // namespace

std::string to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::BH: return "BH";
        case BaselineKind::MACD: return "MACD";
        case BaselineKind::KDJRSI: return "KDJ-RSI";
        case BaselineKind::CR: return "CR";
        case BaselineKind::BBI: return "BBI";
        case BaselineKind::WR: return "WR";
        default: return "BIAS";
    }
}

BaselineKind baseline_from_string(const std::string& s) {
    for (BaselineKind k : all_baselines())
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown baseline '" + s + "'");
}

const std::array<BaselineKind, kBaselineCount>& all_baselines() {
    static const std::array<BaselineKind, kBaselineCount> kinds = {
        BaselineKind::BH,  BaselineKind::MACD, BaselineKind::KDJRSI, BaselineKind::CR,
        BaselineKind::BBI, BaselineKind::WR,   BaselineKind::BIAS};
    return kinds;
}

std::size_t baseline_warmup(BaselineKind kind, const BaselineParams& params) {
    switch (kind) {
        case BaselineKind::BH: return 0;
        case BaselineKind::MACD: return 26;
        case BaselineKind::KDJRSI: return 15;
        case BaselineKind::CR: return 0;
        case BaselineKind::BBI: return 24;
        case BaselineKind::WR: return params.wr_period;
        default: return params.bias_period;
    }
}

int baseline_signal(BaselineKind kind, const BarSeries& series, std::size_t t,
                    const BaselineParams& params) {
    if (t >= series.size()) throw std::invalid_argument("baseline_signal: t out of range");
    if (t < baseline_warmup(kind, params))
        throw std::invalid_argument("baseline_signal: t inside warm-up for " + to_string(kind));

    switch (kind) {
        case BaselineKind::BH:
            return 1;
        case BaselineKind::MACD: {
            const auto closes = closes_of(series);
            const auto ema12 = indicators::ema(closes, 12);
            const auto ema26 = indicators::ema(closes, 26);
            return sign_of(ema12[t] - ema26[t]);
        }
        case BaselineKind::KDJRSI: {
            const auto closes = closes_of(series);
            const auto kdj = indicators::kdj(series, 9);
            const auto rsi = indicators::rsi(closes, 14);
            if (kdj.k[t] < 20.0 && rsi[t] < 30.0) return 1;
            if (kdj.k[t] > 80.0 && rsi[t] > 70.0) return -1;
            return 0;
        }
        case BaselineKind::CR: {
            const auto& b = series[t];
            const double typical = 0.25 * (b.high + b.low + b.open + b.close);
            return sign_of(b.close - typical);
        }
        case BaselineKind::BBI: {
            const auto closes = closes_of(series);
            double bbi = 0.0;
            for (std::size_t n : {3u, 6u, 12u, 24u}) bbi += indicators::sma(closes, n)[t];
            bbi *= 0.25;
            return sign_of(series[t].close - bbi);
        }
        case BaselineKind::WR: {
            const std::size_t n = params.wr_period;
            double hh = -std::numeric_limits<double>::infinity();
            double ll = std::numeric_limits<double>::infinity();
            for (std::size_t i = t + 1 - n; i <= t; ++i) {
                hh = std::max(hh, series[i].high);
                ll = std::min(ll, series[i].low);
            }
            if (hh == ll) return 0;
            const double wr = -100.0 * (hh - series[t].close) / (hh - ll);
            if (wr < -80.0) return 1;
            if (wr > -20.0) return -1;
            return 0;
        }
        default: {  // BIAS
            const auto closes = closes_of(series);
            const double ma = indicators::sma(closes, params.bias_period)[t];
            return sign_of(ma - series[t].close);   // sign(-BIAS)
        }
    }
}

backtest::BacktestResult run_baseline(BaselineKind kind, const BarSeries& series,
                                      const WindowRef& w, const backtest::ExecutionConfig& cfg,
                                      const BaselineParams& params) {
    if (w.horizon_end > series.size() || w.horizon_begin >= w.horizon_end)
        throw std::invalid_argument("run_baseline: window out of range");
    if (w.horizon_begin < baseline_warmup(kind, params))
        throw std::invalid_argument("run_baseline: warm-up not available before window start");

    backtest::BacktestResult result;
    result.asset = series.asset;
    result.label = to_string(kind);
    result.window_begin = w.horizon_begin;
    result.window_end = w.horizon_end;

    backtest::Portfolio pf;
    pf.cash = cfg.initial_cash;
    pf.last_price = series[w.horizon_begin].close;
    int position = 0;

    auto trade = [&](std::size_t t, const strategy::TradeAction& action) {
        const double price = series[t].close;
        backtest::TradeRecord rec;
        rec.timestamp = series[t].timestamp;
        rec.verb = strategy::to_string(action.verb);
        rec.price = price;
        rec.fraction = action.fraction;
        rec.notional = action.fraction * (pf.cash + pf.shares * price);
        rec.fees = rec.notional * cfg.fee_rate;
        rec.reason = action.reason;
        result.trades.push_back(rec);
        pf = backtest::apply_action(pf, action, price, cfg);
    };

    for (std::size_t t = w.horizon_begin; t < w.horizon_end; ++t) {
        const double price = series[t].close;
        if (t + 1 == w.horizon_end) {
            if (position != 0) trade(t, {strategy::Verb::Close, 0.0, "end_of_window"});
            position = 0;
        } else {
            int desired = baseline_signal(kind, series, t, params);
            if (!params.long_short && desired < 0) desired = 0;
            if (desired != position) {
                if (position != 0) trade(t, {strategy::Verb::Close, 0.0, "signal_change"});
                // Longs deploy the full slice; shorts use half notional, the
                // same convention as the always-short action.
                if (desired > 0) trade(t, {strategy::Verb::Buy, 1.0, "signal_long"});
                else if (desired < 0) trade(t, {strategy::Verb::Sell, 0.5, "signal_short"});
                position = desired;
            }
        }
        pf.last_price = price;
        result.equity_curve.push_back(pf.equity());
        if (pf.equity() <= 0.0) break;
    }

    while (!result.equity_curve.empty() && result.equity_curve.back() <= 0.0) {
        result.equity_curve.pop_back();
        result.aborted = true;
        result.abort_reason = "margin breach";
    }
    result.returns = metrics::simple_returns(result.equity_curve);
    if (result.equity_curve.size() >= 2) result.metrics = metrics::report(result.equity_curve);
    return result;
}

}  // namespace mixbt::baselines

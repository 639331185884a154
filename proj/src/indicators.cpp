#include "mixbt/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mixbt/kernels.hpp"

namespace mixbt::indicators {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

IndicatorColumn make_column(std::string name, std::size_t size, std::size_t first_valid) {
    IndicatorColumn col;
    col.name = std::move(name);
    col.first_valid = std::min(first_valid, size);
    col.values.assign(size, kNan);
    return col;
}

std::vector<double> closes_of(const BarSeries& series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& b : series.bars) out.push_back(b.close);
    return out;
}

}  // namespace

IndicatorColumn sma(const std::vector<double>& closes, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sma: n must be >= 1");
    IndicatorColumn col = make_column("sma" + std::to_string(n), closes.size(), n - 1);
    kernels::rolling_mean(closes, n, col.values);
    return col;
}

IndicatorColumn ema(const std::vector<double>& closes, std::size_t n) {
    if (n == 0) throw std::invalid_argument("ema: n must be >= 1");
    IndicatorColumn col = make_column("ema" + std::to_string(n), closes.size(), n - 1);
    if (closes.size() < n) return col;
    const double alpha = 2.0 / (static_cast<double>(n) + 1.0);
    double value = kernels::sum(std::span<const double>(closes).first(n)) / static_cast<double>(n);
    col.values[n - 1] = value;
    for (std::size_t t = n; t < closes.size(); ++t) {
        value = alpha * closes[t] + (1.0 - alpha) * value;
        col.values[t] = value;
    }
    return col;
}

IndicatorColumn rsi(const std::vector<double>& closes, std::size_t n) {
    if (n == 0) throw std::invalid_argument("rsi: n must be >= 1");
    IndicatorColumn col = make_column("rsi" + std::to_string(n), closes.size(), n);
    if (closes.size() < n + 1) return col;

    auto rsi_of = [](double avg_gain, double avg_loss) {
        if (avg_loss == 0.0 && avg_gain == 0.0) return 50.0;
        if (avg_loss == 0.0) return 100.0;
        const double rs = avg_gain / avg_loss;
        return 100.0 - 100.0 / (1.0 + rs);
    };

    double avg_gain = 0.0;
    double avg_loss = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        const double change = closes[t] - closes[t - 1];
        if (change > 0.0) avg_gain += change;
        else avg_loss -= change;
    }
    avg_gain /= static_cast<double>(n);
    avg_loss /= static_cast<double>(n);
    col.values[n] = rsi_of(avg_gain, avg_loss);

    for (std::size_t t = n + 1; t < closes.size(); ++t) {
        const double change = closes[t] - closes[t - 1];
        const double gain = change > 0.0 ? change : 0.0;
        const double loss = change < 0.0 ? -change : 0.0;
        avg_gain = (avg_gain * static_cast<double>(n - 1) + gain) / static_cast<double>(n);
        avg_loss = (avg_loss * static_cast<double>(n - 1) + loss) / static_cast<double>(n);
        col.values[t] = rsi_of(avg_gain, avg_loss);
    }
    return col;
}

BollingerBands bollinger(const std::vector<double>& closes, std::size_t n, double k) {
    if (n < 2) throw std::invalid_argument("bollinger: n must be >= 2");
    BollingerBands bands;
    bands.middle = sma(closes, n);
    bands.middle.name = "boll_middle";
    bands.upper = make_column("boll_upper", closes.size(), n - 1);
    bands.lower = make_column("boll_lower", closes.size(), n - 1);
    std::vector<double> sd(closes.size(), kNan);
    kernels::rolling_std(closes, n, 0, sd);
    for (std::size_t t = n - 1; t < closes.size(); ++t) {
        bands.upper.values[t] = bands.middle.values[t] + k * sd[t];
        bands.lower.values[t] = bands.middle.values[t] - k * sd[t];
    }
    return bands;
}

KdjColumns kdj(const BarSeries& series, std::size_t n) {
    if (n == 0) throw std::invalid_argument("kdj: n must be >= 1");
    const std::size_t len = series.size();
    KdjColumns out;
    out.k = make_column("kdj_k", len, n - 1);
    out.d = make_column("kdj_d", len, n - 1);
    out.j = make_column("kdj_j", len, n - 1);
    if (len < n) return out;

    double k_prev = 50.0;
    double d_prev = 50.0;
    for (std::size_t t = n - 1; t < len; ++t) {
        double hh = -std::numeric_limits<double>::infinity();
        double ll = std::numeric_limits<double>::infinity();
        for (std::size_t i = t + 1 - n; i <= t; ++i) {
            hh = std::max(hh, series[i].high);
            ll = std::min(ll, series[i].low);
        }
        const double rsv = hh == ll ? 50.0 : 100.0 * (series[t].close - ll) / (hh - ll);
        // (2k + x) / 3 keeps the 50 fixed point exact on flat windows
        const double k_now = (2.0 * k_prev + rsv) / 3.0;
        const double d_now = (2.0 * d_prev + k_now) / 3.0;
        out.k.values[t] = k_now;
        out.d.values[t] = d_now;
        out.j.values[t] = 3.0 * k_now - 2.0 * d_now;
        k_prev = k_now;
        d_prev = d_now;
    }
    return out;
}

MacdColumns macd(const std::vector<double>& closes) {
    if (closes.size() < 26) throw std::invalid_argument("macd: need at least 26 closes");
    MacdColumns out;
    const IndicatorColumn ema12 = ema(closes, 12);
    const IndicatorColumn ema26 = ema(closes, 26);
    out.dif = make_column("macd_dif", closes.size(), 25);
    for (std::size_t t = 25; t < closes.size(); ++t)
        out.dif.values[t] = ema12.values[t] - ema26.values[t];

    // DEA: EMA(9) of DIF over its defined range.
    std::vector<double> dif_defined(out.dif.values.begin() + 25, out.dif.values.end());
    const IndicatorColumn dea_local = ema(dif_defined, 9);
    out.dea = make_column("macd_dea", closes.size(), 25 + dea_local.first_valid);
    for (std::size_t i = dea_local.first_valid; i < dif_defined.size(); ++i)
        out.dea.values[25 + i] = dea_local.values[i];

    out.histogram = make_column("macd_hist", closes.size(), out.dea.first_valid);
    for (std::size_t t = out.dea.first_valid; t < closes.size(); ++t)
        out.histogram.values[t] = out.dif.values[t] - out.dea.values[t];
    return out;
}

IndicatorColumn true_range(const BarSeries& series) {
    IndicatorColumn col = make_column("true_range", series.size(), 1);
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double prev_close = series[t - 1].close;
        col.values[t] = std::max(series[t].high, prev_close) - std::min(series[t].low, prev_close);
    }
    return col;
}

IndicatorColumn atr(const BarSeries& series, std::size_t n) {
    // Unweighted n-term mean of true ranges (not Wilder smoothing).
    if (n == 0) throw std::invalid_argument("atr: n must be >= 1");
    IndicatorColumn col = make_column("atr" + std::to_string(n), series.size(), n);
    if (series.size() < n + 1) return col;
    const IndicatorColumn tr = true_range(series);
    for (std::size_t t = n; t < series.size(); ++t) {
        col.values[t] =
            kernels::sum(std::span<const double>(tr.values).subspan(t + 1 - n, n)) /
            static_cast<double>(n);
    }
    return col;
}

AdxColumns adx_di(const BarSeries& series, std::size_t n) {
    if (n == 0) throw std::invalid_argument("adx_di: n must be >= 1");
    const std::size_t len = series.size();
    AdxColumns out;
    out.plus_di = make_column("plus_di", len, n);
    out.minus_di = make_column("minus_di", len, n);
    out.adx = make_column("adx", len, 2 * n);
    if (len < 2 * n + 1) return out;

    std::vector<double> plus_dm(len, 0.0), minus_dm(len, 0.0), tr(len, 0.0);
    for (std::size_t t = 1; t < len; ++t) {
        const double up = series[t].high - series[t - 1].high;
        const double down = series[t - 1].low - series[t].low;
        plus_dm[t] = (up > down && up > 0.0) ? up : 0.0;
        minus_dm[t] = (down > up && down > 0.0) ? down : 0.0;
        const double prev_close = series[t - 1].close;
        tr[t] = std::max(series[t].high, prev_close) - std::min(series[t].low, prev_close);
    }

    // Wilder smoothing: seed with the sum over the first n movement terms.
    double sm_plus = 0.0, sm_minus = 0.0, sm_tr = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        sm_plus += plus_dm[t];
        sm_minus += minus_dm[t];
        sm_tr += tr[t];
    }

    std::vector<double> dx(len, kNan);
    auto emit_di = [&](std::size_t t) {
        const double p = sm_tr == 0.0 ? 0.0 : 100.0 * sm_plus / sm_tr;
        const double m = sm_tr == 0.0 ? 0.0 : 100.0 * sm_minus / sm_tr;
        out.plus_di.values[t] = p;
        out.minus_di.values[t] = m;
        dx[t] = (p + m) == 0.0 ? 0.0 : 100.0 * std::abs(p - m) / (p + m);
    };
    emit_di(n);
    for (std::size_t t = n + 1; t < len; ++t) {
        sm_plus = sm_plus - sm_plus / static_cast<double>(n) + plus_dm[t];
        sm_minus = sm_minus - sm_minus / static_cast<double>(n) + minus_dm[t];
        sm_tr = sm_tr - sm_tr / static_cast<double>(n) + tr[t];
        emit_di(t);
    }

    // ADX seed: mean of the first n DX values, then Wilder recursion; the
    // first emitted value lands at index 2n.
    double adx_val = 0.0;
    for (std::size_t t = n; t < 2 * n; ++t) adx_val += dx[t];
    adx_val /= static_cast<double>(n);
    for (std::size_t t = 2 * n; t < len; ++t) {
        adx_val = (adx_val * static_cast<double>(n - 1) + dx[t]) / static_cast<double>(n);
        out.adx.values[t] = adx_val;
    }
    return out;
}

DonchianChannel donchian(const BarSeries& series, std::size_t n) {
    if (n == 0) throw std::invalid_argument("donchian: n must be >= 1");
    const std::size_t len = series.size();
    DonchianChannel out;
    out.highest_high = make_column("donchian_high" + std::to_string(n), len, n);
    out.lowest_low = make_column("donchian_low" + std::to_string(n), len, n);
    for (std::size_t t = n; t < len; ++t) {
        double hh = -std::numeric_limits<double>::infinity();
        double ll = std::numeric_limits<double>::infinity();
        for (std::size_t i = t - n; i < t; ++i) {
            hh = std::max(hh, series[i].high);
            ll = std::min(ll, series[i].low);
        }
        out.highest_high.values[t] = hh;
        out.lowest_low.values[t] = ll;
    }
    return out;
}

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "close", "high", "low", "open", "norm_volume", "price_change", "amplitude",
        "ma10", "ma20", "ma100", "rsi14", "boll_upper", "boll_middle", "boll_lower",
        "kdj_k", "kdj_d", "kdj_j"};
    return names;
}

FeatureMatrix feature_matrix(const BarSeries& series, std::size_t t, std::size_t window) {
    if (window == 0) throw std::invalid_argument("feature_matrix: window must be >= 1");
    if (t >= series.size() || t < window + 99)
        throw std::invalid_argument("feature_matrix: insufficient history at t=" + std::to_string(t));

    const std::vector<double> closes = closes_of(series);
    const IndicatorColumn ma10 = sma(closes, 10);
    const IndicatorColumn ma20 = sma(closes, 20);
    const IndicatorColumn ma100 = sma(closes, 100);
    const IndicatorColumn rsi14 = rsi(closes, 14);
    const BollingerBands boll = bollinger(closes, 20, 1.8);
    const KdjColumns kdj9 = kdj(series, 9);

    FeatureMatrix fm;
    fm.rows = window;
    fm.raw.assign(window * kFeatureCount, 0.0);
    fm.standardized.assign(window * kFeatureCount, 0.0);

    const std::size_t begin = t + 1 - window;
    double volume_mean = 0.0;
    for (std::size_t i = begin; i <= t; ++i) volume_mean += series[i].volume;
    volume_mean /= static_cast<double>(window);

    for (std::size_t r = 0; r < window; ++r) {
        const std::size_t i = begin + r;
        const auto& bar = series[i];
        double* row = fm.raw.data() + r * kFeatureCount;
        row[0] = bar.close;
        row[1] = bar.high;
        row[2] = bar.low;
        row[3] = bar.open;
        row[4] = volume_mean == 0.0 ? 0.0 : bar.volume / volume_mean;
        row[5] = (bar.close - series[i - 1].close) / series[i - 1].close;
        row[6] = (bar.high - bar.low) / series[i - 1].close;
        row[7] = ma10.values[i];
        row[8] = ma20.values[i];
        row[9] = ma100.values[i];
        row[10] = rsi14.values[i];
        row[11] = boll.upper.values[i];
        row[12] = boll.middle.values[i];
        row[13] = boll.lower.values[i];
        row[14] = kdj9.k.values[i];
        row[15] = kdj9.d.values[i];
        row[16] = kdj9.j.values[i];
    }

    std::vector<double> col(window);
    std::vector<double> std_col(window);
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
        for (std::size_t r = 0; r < window; ++r) col[r] = fm.raw[r * kFeatureCount + c];
        const auto mv = kernels::mean_var(col, 0);
        const double sd = std::sqrt(mv.var);
        fm.mean[c] = mv.mean;
        fm.stdev[c] = sd;
        if (sd == 0.0) {
            std::fill(std_col.begin(), std_col.end(), 0.0);
        } else {
            kernels::scale_shift(col, -mv.mean, 1.0 / sd, std_col);
        }
        for (std::size_t r = 0; r < window; ++r) fm.standardized[r * kFeatureCount + c] = std_col[r];
    }
    return fm;
}

std::string to_string(MaOrdering o) {
    switch (o) {
        case MaOrdering::Bullish: return "bullish";
        case MaOrdering::Bearish: return "bearish";
        default: return "mixed";
    }
}

SummaryStats summary_stats(const BarSeries& series, std::size_t t) {
    if (t >= series.size() || t < 100)
        throw std::invalid_argument("summary_stats: insufficient history at t=" + std::to_string(t));

    const std::vector<double> closes = closes_of(series);
    SummaryStats out;
    out.latest_return = (series[t].close - series[t - 1].close) / series[t - 1].close;
    out.amplitude = (series[t].high - series[t].low) / series[t - 1].close;

    double vol_sum = 0.0;
    for (std::size_t i = t - 5; i < t; ++i) vol_sum += series[i].volume;
    out.volume_ratio = vol_sum == 0.0 ? 0.0 : series[t].volume / (vol_sum / 5.0);

    std::vector<double> log_returns(100);
    for (std::size_t k = 0; k < 100; ++k) {
        const std::size_t i = t - 99 + k;
        log_returns[k] = std::log(series[i].close / series[i - 1].close);
    }
    out.volatility = std::sqrt(kernels::mean_var(log_returns, 0).var);

    const IndicatorColumn atr14 = atr(series, 14);
    out.atr14 = atr14.values[t];

    const IndicatorColumn ma10 = sma(closes, 10);
    const IndicatorColumn ma20 = sma(closes, 20);
    const IndicatorColumn ma100 = sma(closes, 100);
    if (ma10.values[t] > ma20.values[t] && ma20.values[t] > ma100.values[t])
        out.ma_ordering = MaOrdering::Bullish;
    else if (ma10.values[t] < ma20.values[t] && ma20.values[t] < ma100.values[t])
        out.ma_ordering = MaOrdering::Bearish;
    else
        out.ma_ordering = MaOrdering::Mixed;

    const IndicatorColumn rsi14 = rsi(closes, 14);
    out.rsi14 = rsi14.values[t];

    const BollingerBands boll = bollinger(closes, 20, 1.8);
    out.band_width_ratio = (boll.upper.values[t] - boll.lower.values[t]) / boll.middle.values[t];

    std::string ma_state;
    switch (out.ma_ordering) {
        case MaOrdering::Bullish: ma_state = "Bullish order"; break;
        case MaOrdering::Bearish: ma_state = "Bearish order"; break;
        default: ma_state = "Mixed"; break;
    }
    const std::string rsi_zone = out.rsi14 < 30.0   ? "Oversold"
                                 : out.rsi14 > 70.0 ? "Overbought"
                                                    : "Neutral";
    double atr_mean = 0.0;
    for (std::size_t i = t - 14; i < t; ++i) atr_mean += atr14.values[i];
    atr_mean /= 14.0;
    const std::string vol_change = out.atr14 > atr_mean   ? "Increasing volatility"
                                   : out.atr14 < atr_mean ? "Decreasing volatility"
                                                          : "Stable volatility";
    out.market_summary = ma_state + " | " + rsi_zone + " | " + vol_change;
    return out;
}

}  // namespace mixbt::indicators

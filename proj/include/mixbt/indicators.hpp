#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mixbt/market_data.hpp"

namespace mixbt::indicators {

using market_data::BarSeries;

// One value per source bar; the leading warm-up entries are NaN and
// `first_valid` marks the start of the contiguous defined suffix.
struct IndicatorColumn {
    std::string name;
    std::size_t first_valid = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool defined(std::size_t i) const { return i >= first_valid && i < values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

IndicatorColumn sma(const std::vector<double>& closes, std::size_t n);
IndicatorColumn ema(const std::vector<double>& closes, std::size_t n);
IndicatorColumn rsi(const std::vector<double>& closes, std::size_t n = 14);

struct BollingerBands {
    IndicatorColumn upper;
    IndicatorColumn middle;
    IndicatorColumn lower;
};
BollingerBands bollinger(const std::vector<double>& closes, std::size_t n = 20, double k = 1.8);

struct KdjColumns {
    IndicatorColumn k;
    IndicatorColumn d;
    IndicatorColumn j;
};
KdjColumns kdj(const BarSeries& series, std::size_t n = 9);

struct MacdColumns {
    IndicatorColumn dif;
    IndicatorColumn dea;
    IndicatorColumn histogram;
};
MacdColumns macd(const std::vector<double>& closes);

IndicatorColumn true_range(const BarSeries& series);
IndicatorColumn atr(const BarSeries& series, std::size_t n = 14);

struct AdxColumns {
    IndicatorColumn adx;
    IndicatorColumn plus_di;
    IndicatorColumn minus_di;
};
AdxColumns adx_di(const BarSeries& series, std::size_t n = 14);

// Channel values at t cover bars [t-n, t-1]: the current bar is excluded so
// that a breakout can actually pierce the channel.
struct DonchianChannel {
    IndicatorColumn highest_high;
    IndicatorColumn lowest_low;
};
DonchianChannel donchian(const BarSeries& series, std::size_t n);

inline constexpr std::size_t kFeatureCount = 17;
const std::array<std::string, kFeatureCount>& feature_names();

// K x 17 window ending at bar t: close, high, low, open, normalized volume,
// price change, amplitude, MA10/20/100, RSI, BOLL upper/middle/lower, KDJ K/D/J.
// Standardized per column over the window; constant columns standardize to zeros.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = kFeatureCount;
    std::vector<double> raw;            // row-major rows x cols
    std::vector<double> standardized;   // row-major rows x cols
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> stdev{};

    double raw_at(std::size_t r, std::size_t c) const { return raw[r * cols + c]; }
    double std_at(std::size_t r, std::size_t c) const { return standardized[r * cols + c]; }
};

FeatureMatrix feature_matrix(const BarSeries& series, std::size_t t, std::size_t window = 100);

enum class MaOrdering { Bullish, Bearish, Mixed };
std::string to_string(MaOrdering o);

struct SummaryStats {
    double latest_return = 0.0;       // (C_t - C_{t-1}) / C_{t-1}
    double amplitude = 0.0;           // (H_t - L_t) / C_{t-1}
    double volume_ratio = 0.0;        // V_t / mean(V_{t-5..t-1})
    double volatility = 0.0;          // std of last 100 log returns
    double atr14 = 0.0;
    MaOrdering ma_ordering = MaOrdering::Mixed;
    double rsi14 = 0.0;
    double band_width_ratio = 0.0;    // (upper - lower) / middle
    std::string market_summary;       // "<MA state> | <RSI zone> | <volatility change>"
};

SummaryStats summary_stats(const BarSeries& series, std::size_t t);

}  // namespace mixbt::indicators

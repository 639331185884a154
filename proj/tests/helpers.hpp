// Shared test fixtures: deterministic random series builders.
#pragma once

#include <vector>

#include "mixbt/market_data.hpp"
#include "mixbt/rng.hpp"

#include "oracles.hpp"

namespace helpers {

using mixbt::market_data::Bar;
using mixbt::market_data::BarSeries;

// Bars from closes only: open = previous close, high/low bracket the body.
inline BarSeries series_from_closes(const std::vector<double>& closes,
                                    const std::string& asset = "TEST") {
    BarSeries s;
    s.asset = asset;
    for (std::size_t i = 0; i < closes.size(); ++i) {
        Bar b;
        b.timestamp = 10957 + static_cast<std::int64_t>(i);   // from 2000-01-01
        b.open = i == 0 ? closes[0] : closes[i - 1];
        b.close = closes[i];
        b.high = std::max(b.open, b.close) * 1.001;
        b.low = std::min(b.open, b.close) * 0.999;
        b.volume = 1.0e6;
        s.bars.push_back(b);
    }
    return s;
}

inline BarSeries random_series(std::uint64_t seed, std::size_t n, double vol = 0.02,
                               double drift = 0.0) {
    mixbt::rng::Stream rng(seed);
    BarSeries s;
    s.asset = "RND" + std::to_string(seed);
    double close = 100.0;
    for (std::size_t i = 0; i < n; ++i) {
        Bar b;
        b.timestamp = 10957 + static_cast<std::int64_t>(i);
        b.open = close;
        close *= std::exp(drift + vol * rng.normal());
        b.close = close;
        const double hi_ext = std::abs(rng.normal()) * vol * 0.5;
        const double lo_ext = std::abs(rng.normal()) * vol * 0.5;
        b.high = std::max(b.open, b.close) * (1.0 + hi_ext);
        b.low = std::min(b.open, b.close) * (1.0 - lo_ext);
        b.volume = 1.0e6 * std::exp(0.3 * rng.normal());
        s.bars.push_back(b);
    }
    return s;
}

inline std::vector<double> closes_of(const BarSeries& s) {
    std::vector<double> out;
    for (const auto& b : s.bars) out.push_back(b.close);
    return out;
}

inline std::vector<oracles::OhlcRow> rows_of(const BarSeries& s) {
    std::vector<oracles::OhlcRow> out;
    for (const auto& b : s.bars) out.push_back({b.open, b.high, b.low, b.close, b.volume});
    return out;
}

}  // namespace helpers

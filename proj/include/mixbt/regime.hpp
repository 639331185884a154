#pragma once

#include <string>

#include "mixbt/market_data.hpp"

namespace mixbt::regime {

using market_data::BarSeries;
using market_data::WindowRef;

enum class RegimeLabel { Uptrend, Downtrend, Consolidation };

std::string to_string(RegimeLabel l);
RegimeLabel regime_from_string(const std::string& s);

inline constexpr std::size_t kClassifyWarmup = 28;  // ADX(14) availability

// Uptrend:   MA5 > MA20 and ADX > 15 and +DI > -DI
// Downtrend: MA5 < MA20 and ADX > 15 and -DI > +DI
// otherwise Consolidation (ADX <= 15 lands here).
RegimeLabel classify_from_values(double ma5, double ma20, double adx, double plus_di,
                                 double minus_di);

RegimeLabel classify_day(const BarSeries& series, std::size_t t);

// Majority label over the window's days: Uptrend/Downtrend when their share
// reaches 50%; an exact 50/50 between them is Consolidation.
RegimeLabel label_window(const BarSeries& series, const WindowRef& w);

}  // namespace mixbt::regime

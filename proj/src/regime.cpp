#include "mixbt/regime.hpp"

#include <stdexcept>

#include "mixbt/indicators.hpp"

namespace mixbt::regime {

std::string to_string(RegimeLabel l) {
    switch (l) {
        case RegimeLabel::Uptrend: return "uptrend";
        case RegimeLabel::Downtrend: return "downtrend";
        default: return "consolidation";
    }
}

RegimeLabel regime_from_string(const std::string& s) {
    if (s == "uptrend") return RegimeLabel::Uptrend;
    if (s == "downtrend") return RegimeLabel::Downtrend;
    if (s == "consolidation") return RegimeLabel::Consolidation;
    throw std::invalid_argument("unknown regime label '" + s + "'");
}

RegimeLabel classify_from_values(double ma5, double ma20, double adx, double plus_di,
                                 double minus_di) {
    const bool strong = adx > 15.0;
    if (ma5 > ma20 && strong && plus_di > minus_di) return RegimeLabel::Uptrend;
    if (ma5 < ma20 && strong && minus_di > plus_di) return RegimeLabel::Downtrend;
    return RegimeLabel::Consolidation;
}

RegimeLabel classify_day(const BarSeries& series, std::size_t t) {
    if (t >= series.size() || t < kClassifyWarmup)
        throw std::invalid_argument("classify_day: t inside warm-up");

    std::vector<double> closes;
    closes.reserve(series.size());
    for (const auto& b : series.bars) closes.push_back(b.close);

    const auto ma5 = indicators::sma(closes, 5);
    const auto ma20 = indicators::sma(closes, 20);
    const auto adx = indicators::adx_di(series, 14);
    return classify_from_values(ma5[t], ma20[t], adx.adx[t], adx.plus_di[t], adx.minus_di[t]);
}

RegimeLabel label_window(const BarSeries& series, const WindowRef& w) {
    if (w.horizon_begin >= w.horizon_end || w.horizon_end > series.size())
        throw std::invalid_argument("label_window: empty or out-of-range window");
    if (w.horizon_begin < kClassifyWarmup)
        throw std::invalid_argument("label_window: warm-up not available");

    // One pass over the series' columns instead of per-day recomputation.
    std::vector<double> closes;
    closes.reserve(series.size());
    for (const auto& b : series.bars) closes.push_back(b.close);
    const auto ma5 = indicators::sma(closes, 5);
    const auto ma20 = indicators::sma(closes, 20);
    const auto adx = indicators::adx_di(series, 14);

    std::size_t up = 0, down = 0;
    const std::size_t n = w.horizon_end - w.horizon_begin;
    for (std::size_t t = w.horizon_begin; t < w.horizon_end; ++t) {
        const auto label =
            classify_from_values(ma5[t], ma20[t], adx.adx[t], adx.plus_di[t], adx.minus_di[t]);
        up += label == RegimeLabel::Uptrend;
        down += label == RegimeLabel::Downtrend;
    }
    const bool up50 = 2 * up >= n;
    const bool down50 = 2 * down >= n;
    if (up50 && down50) return RegimeLabel::Consolidation;
    if (up50) return RegimeLabel::Uptrend;
    if (down50) return RegimeLabel::Downtrend;
    return RegimeLabel::Consolidation;
}

}  // namespace mixbt::regime

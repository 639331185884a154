#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixbt::market_data {

// Calendar dates are opaque ordered keys at trading-day granularity,
// stored as days since 1970-01-01 (no exchange calendar, no timezones).
std::int64_t parse_iso_date(const std::string& s);   // "YYYY-MM-DD"
std::string format_iso_date(std::int64_t day);

struct Bar {
    std::int64_t timestamp = 0;   // days since epoch
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    bool valid() const;
};

struct BarSeries {
    std::string asset;
    std::vector<Bar> bars;

    std::size_t size() const { return bars.size(); }
    const Bar& operator[](std::size_t i) const { return bars[i]; }
};

// Throws std::invalid_argument naming the first offending row.
void validate(const BarSeries& series);

struct CsvSchema {
    std::string date = "date";
    std::string open = "open";
    std::string high = "high";
    std::string low = "low";
    std::string close = "close";
    std::string volume = "volume";
};

BarSeries load_csv(const std::string& path, const CsvSchema& schema = {},
                   const std::string& asset = "");
void write_csv(const BarSeries& series, const std::string& path);

struct SplitSpec {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;

    bool valid() const;
};

struct SplitResult {
    BarSeries train;
    BarSeries validation;
    BarSeries test;
};

// Contiguous temporal partition, train first; train/validation get
// floor(n*f), the remainder goes to test.
SplitResult split(const BarSeries& series, const SplitSpec& spec);

struct WindowRef {
    std::size_t lookback_begin = 0;   // first index of the lookback slice
    std::size_t horizon_begin = 0;    // == lookback_begin + lookback
    std::size_t horizon_end = 0;      // one past the last traded bar

    std::size_t decision_index() const { return horizon_begin - 1; }
};

// Non-overlapping-by-default decision windows; the last partial pair is dropped.
// A series shorter than lookback+horizon yields an empty list (not an error).
std::vector<WindowRef> windows(std::size_t series_length, std::size_t lookback,
                               std::size_t horizon, std::size_t stride);

enum class RegimeKind { Up, Down, Flat };

RegimeKind regime_kind_from_string(const std::string& s);
std::string to_string(RegimeKind k);

struct RegimeSegment {
    RegimeKind kind = RegimeKind::Flat;
    std::size_t length = 0;        // bars
    double drift = 0.0;            // log-price drift per bar
    double volatility = 0.0;       // log-return std per bar
    // Pull per bar toward the segment's starting log-price (0 = pure GBM).
    // Gives flat regimes a mean-reverting range so the reversal family has
    // something to trade.
    double reversion = 0.0;
};

struct SynthConfig {
    std::size_t num_bars = 0;      // total bars including the seed bar
    std::vector<RegimeSegment> schedule;   // consumed in order, cycled if exhausted
    std::uint64_t seed = 42;
    double initial_price = 100.0;
    std::string asset = "SYNTH";

    bool valid() const;
};

// Geometric-Brownian log-returns per regime with clamped intrabar range.
// Pure function of the config: same config, bit-identical series.
BarSeries synth_generate(const SynthConfig& cfg);

// Ground-truth regime kind for each generated bar (index 0 is the seed bar
// and reuses the first segment's kind). Matches synth_generate's schedule walk.
std::vector<RegimeKind> synth_regime_of_bar(const SynthConfig& cfg);

}  // namespace mixbt::market_data

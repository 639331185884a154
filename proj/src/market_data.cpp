#include "mixbt/market_data.hpp"

#include "mixbt/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mixbt::market_data {

namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097LL + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

double parse_double(const std::string& s, std::size_t line, const std::string& what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw std::invalid_argument("load_csv: unparsable " + what + " '" + s + "' at line " +
                                    std::to_string(line));
    return v;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string token;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(token);
            token.clear();
        } else if (c != '\r') {
            token.push_back(c);
        }
    }
    fields.push_back(token);
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::int64_t parse_iso_date(const std::string& s) {
    const std::string t = trim(s);
    int y = 0;
    unsigned m = 0, d = 0;
    if (t.size() < 10 || t[4] != '-' || t[7] != '-' ||
        std::sscanf(t.c_str(), "%4d-%2u-%2u", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 || d > 31)
        throw std::invalid_argument("unparsable ISO-8601 date '" + s + "'");
    return days_from_civil(y, m, d);
}

std::string format_iso_date(std::int64_t day) {
    int y;
    unsigned m, d;
    civil_from_days(day, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

bool Bar::valid() const {
    return open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0 && volume >= 0.0 &&
           low <= std::min(open, close) && high >= std::max(open, close) && low <= high;
}

void validate(const BarSeries& series) {
    if (series.bars.empty()) throw std::invalid_argument("series '" + series.asset + "' is empty");
    for (std::size_t i = 0; i < series.bars.size(); ++i) {
        if (!series.bars[i].valid())
            throw std::invalid_argument("series '" + series.asset + "': bar invariant violated at row " +
                                        std::to_string(i));
        if (i > 0 && series.bars[i].timestamp <= series.bars[i - 1].timestamp)
            throw std::invalid_argument("series '" + series.asset + "': non-monotone timestamps at row " +
                                        std::to_string(i));
    }
}

BarSeries load_csv(const std::string& path, const CsvSchema& schema, const std::string& asset) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty file '" + path + "'");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_line(line);
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        throw std::invalid_argument("load_csv: missing column '" + name + "' in '" + path + "'");
    };
    const std::size_t c_date = col(schema.date);
    const std::size_t c_open = col(schema.open);
    const std::size_t c_high = col(schema.high);
    const std::size_t c_low = col(schema.low);
    const std::size_t c_close = col(schema.close);
    const std::size_t c_vol = col(schema.volume);

    BarSeries series;
    series.asset = asset.empty() ? path : asset;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_line(line);
        const std::size_t needed = std::max({c_date, c_open, c_high, c_low, c_close, c_vol});
        if (fields.size() <= needed)
            throw std::invalid_argument("load_csv: too few fields at line " + std::to_string(line_no));
        Bar bar;
        try {
            bar.timestamp = parse_iso_date(fields[c_date]);
        } catch (const std::exception& e) {
            throw std::invalid_argument("load_csv: " + std::string(e.what()) + " at line " +
                                        std::to_string(line_no));
        }
        bar.open = parse_double(trim(fields[c_open]), line_no, "open");
        bar.high = parse_double(trim(fields[c_high]), line_no, "high");
        bar.low = parse_double(trim(fields[c_low]), line_no, "low");
        bar.close = parse_double(trim(fields[c_close]), line_no, "close");
        bar.volume = parse_double(trim(fields[c_vol]), line_no, "volume");
        if (!bar.valid())
            throw std::invalid_argument("load_csv: bar invariant violated at line " +
                                        std::to_string(line_no));
        if (!series.bars.empty() && bar.timestamp <= series.bars.back().timestamp)
            throw std::invalid_argument("load_csv: non-monotone timestamps at line " +
                                        std::to_string(line_no));
        series.bars.push_back(bar);
    }
    if (series.bars.empty()) throw std::invalid_argument("load_csv: no data rows in '" + path + "'");
    return series;
}

void write_csv(const BarSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_csv: cannot open '" + path + "'");
    out << "date,open,high,low,close,volume\n";
    char buf[160];
    for (const Bar& b : series.bars) {
        std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      format_iso_date(b.timestamp).c_str(), b.open, b.high, b.low, b.close, b.volume);
        out << buf;
    }
}

bool SplitSpec::valid() const {
    return train > 0.0 && validation > 0.0 && test > 0.0 &&
           std::abs(train + validation + test - 1.0) <= 1e-9;
}

SplitResult split(const BarSeries& series, const SplitSpec& spec) {
    if (!spec.valid()) throw std::invalid_argument("split: fractions must be positive and sum to 1");
    const std::size_t n = series.size();
    if (n < 5) throw std::invalid_argument("split: series too short");
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train));
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.validation));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= n)
        throw std::invalid_argument("split: series too short for all three parts to be non-empty");

    SplitResult out;
    out.train.asset = out.validation.asset = out.test.asset = series.asset;
    out.train.bars.assign(series.bars.begin(), series.bars.begin() + n_train);
    out.validation.bars.assign(series.bars.begin() + n_train, series.bars.begin() + n_train + n_val);
    out.test.bars.assign(series.bars.begin() + n_train + n_val, series.bars.end());
    return out;
}

std::vector<WindowRef> windows(std::size_t series_length, std::size_t lookback,
                               std::size_t horizon, std::size_t stride) {
    if (lookback == 0 || horizon == 0 || stride == 0)
        throw std::invalid_argument("windows: lookback, horizon and stride must be >= 1");
    std::vector<WindowRef> out;
    for (std::size_t start = 0; start + lookback + horizon <= series_length; start += stride) {
        WindowRef w;
        w.lookback_begin = start;
        w.horizon_begin = start + lookback;
        w.horizon_end = start + lookback + horizon;
        out.push_back(w);
    }
    return out;
}

RegimeKind regime_kind_from_string(const std::string& s) {
    if (s == "up") return RegimeKind::Up;
    if (s == "down") return RegimeKind::Down;
    if (s == "flat") return RegimeKind::Flat;
    throw std::invalid_argument("unknown regime kind '" + s + "'");
}

std::string to_string(RegimeKind k) {
    switch (k) {
        case RegimeKind::Up: return "up";
        case RegimeKind::Down: return "down";
        default: return "flat";
    }
}

bool SynthConfig::valid() const {
    if (num_bars < 1 || initial_price <= 0.0 || schedule.empty()) return false;
    for (const auto& seg : schedule)
        if (seg.length == 0 || seg.volatility < 0.0 || seg.reversion < 0.0) return false;
    return true;
}

BarSeries synth_generate(const SynthConfig& cfg) {
    if (!cfg.valid()) throw std::invalid_argument("synth_generate: invalid config");
    rng::Stream rng(cfg.seed);

    BarSeries series;
    series.asset = cfg.asset;
    series.bars.reserve(cfg.num_bars);

    constexpr double kBaseVolume = 1.0e6;
    std::int64_t day = parse_iso_date("2000-01-03");

    Bar seed;
    seed.timestamp = day;
    seed.open = seed.high = seed.low = seed.close = cfg.initial_price;
    seed.volume = kBaseVolume;
    series.bars.push_back(seed);

    std::size_t seg_idx = 0;
    std::size_t seg_used = 0;
    double anchor_log = std::log(cfg.initial_price);
    for (std::size_t i = 1; i < cfg.num_bars; ++i) {
        bool new_segment = false;
        while (seg_used >= cfg.schedule[seg_idx].length) {
            seg_idx = (seg_idx + 1) % cfg.schedule.size();
            seg_used = 0;
            new_segment = true;
        }
        const RegimeSegment& seg = cfg.schedule[seg_idx];
        ++seg_used;

        // Fixed draw count per bar so the price path is exact when volatility is zero.
        const double z_ret = rng.normal();
        const double z_hi = rng.normal();
        const double z_lo = rng.normal();
        const double z_vol = rng.normal();

        const Bar& prev = series.bars.back();
        if (new_segment) anchor_log = std::log(prev.close);
        const double pull = seg.reversion * (anchor_log - std::log(prev.close));
        Bar bar;
        bar.timestamp = ++day;
        bar.open = prev.close;
        bar.close = prev.close * std::exp(seg.drift + pull + seg.volatility * z_ret);

        // Intrabar range scaled by regime volatility, clamped to 3 sigma.
        const double hi_ext = std::min(std::abs(z_hi), 3.0) * seg.volatility * 0.5;
        const double lo_ext = std::min(std::abs(z_lo), 3.0) * seg.volatility * 0.5;
        bar.high = std::max(bar.open, bar.close) * (1.0 + hi_ext);
        bar.low = std::min(bar.open, bar.close) * (1.0 - lo_ext);

        const double vol_sigma = seg.volatility > 0.0 ? 0.3 : 0.0;
        bar.volume = kBaseVolume * std::exp(vol_sigma * z_vol - 0.5 * vol_sigma * vol_sigma);

        series.bars.push_back(bar);
    }
    validate(series);
    return series;
}

std::vector<RegimeKind> synth_regime_of_bar(const SynthConfig& cfg) {
    if (!cfg.valid()) throw std::invalid_argument("synth_regime_of_bar: invalid config");
    std::vector<RegimeKind> out;
    out.reserve(cfg.num_bars);
    out.push_back(cfg.schedule.front().kind);
    std::size_t seg_idx = 0;
    std::size_t seg_used = 0;
    for (std::size_t i = 1; i < cfg.num_bars; ++i) {
        while (seg_used >= cfg.schedule[seg_idx].length) {
            seg_idx = (seg_idx + 1) % cfg.schedule.size();
            seg_used = 0;
        }
        ++seg_used;
        out.push_back(cfg.schedule[seg_idx].kind);
    }
    return out;
}

}  // namespace mixbt::market_data

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mixbt/market_data.hpp"

#include "helpers.hpp"

using namespace mixbt::market_data;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("iso date round trip") {
    CHECK(format_iso_date(parse_iso_date("2020-02-29")) == "2020-02-29");
    CHECK(parse_iso_date("1970-01-01") == 0);
    CHECK(parse_iso_date("1970-01-02") == 1);
    CHECK_THROWS_AS(parse_iso_date("02/29/2020"), std::invalid_argument);
}

TEST_CASE("load_csv parses a well-formed file") {
    const auto path = write_temp_csv("ok.csv",
                                     "date,open,high,low,close,volume\n"
                                     "2020-01-01,10,11,9,10.5,1000\n"
                                     "2020-01-02,10.5,12,10,11,1100\n"
                                     "2020-01-03,11,11.5,10.5,11.2,900\n");
    const auto series = load_csv(path, {}, "X");
    CHECK(series.size() == 3);
    CHECK(series[0].close == doctest::Approx(10.5));
    CHECK(series[2].volume == doctest::Approx(900));
}

TEST_CASE("load_csv honours a column mapping") {
    const auto path = write_temp_csv("mapped.csv",
                                     "Day,O,H,L,C,Vol\n"
                                     "2020-01-01,10,11,9,10.5,1000\n");
    CsvSchema schema;
    schema.date = "Day";
    schema.open = "O";
    schema.high = "H";
    schema.low = "L";
    schema.close = "C";
    schema.volume = "Vol";
    CHECK(load_csv(path, schema).size() == 1);
    CHECK_THROWS_WITH_AS(load_csv(path, {}), doctest::Contains("missing column"),
                         std::invalid_argument);
}

TEST_CASE("load_csv rejects a high < low row with its line") {
    const auto path = write_temp_csv("badrow.csv",
                                     "date,open,high,low,close,volume\n"
                                     "2020-01-01,10,11,9,10.5,1000\n"
                                     "2020-01-02,10,9,11,10,1000\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 3"), std::invalid_argument);
}

TEST_CASE("load_csv rejects duplicate timestamps") {
    const auto path = write_temp_csv("dup.csv",
                                     "date,open,high,low,close,volume\n"
                                     "2020-01-01,10,11,9,10.5,1000\n"
                                     "2020-01-01,10,11,9,10.6,1000\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("non-monotone"), std::invalid_argument);
}

TEST_CASE("load_csv rejects empty and unparsable input") {
    CHECK_THROWS_AS(load_csv(write_temp_csv("empty.csv", "")), std::invalid_argument);
    const auto path = write_temp_csv("noparse.csv",
                                     "date,open,high,low,close,volume\n"
                                     "2020-01-01,10,11,9,abc,1000\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("close"), std::invalid_argument);
}

TEST_CASE("split gives floor sizes with the remainder in test") {
    const auto series = helpers::random_series(1, 1000);
    const auto parts = split(series, {0.6, 0.2, 0.2});
    CHECK(parts.train.size() == 600);
    CHECK(parts.validation.size() == 200);
    CHECK(parts.test.size() == 200);

    const auto small = split(helpers::random_series(2, 10), {0.6, 0.2, 0.2});
    CHECK(small.train.size() == 6);
    CHECK(small.validation.size() == 2);
    CHECK(small.test.size() == 2);

    CHECK_THROWS_AS(split(helpers::random_series(3, 3), {0.6, 0.2, 0.2}), std::invalid_argument);
}

TEST_CASE("split is a partition") {
    const auto series = helpers::random_series(4, 237);
    const auto parts = split(series, {0.6, 0.2, 0.2});
    CHECK(parts.train.size() + parts.validation.size() + parts.test.size() == series.size());
    std::size_t i = 0;
    for (const auto* part : {&parts.train, &parts.validation, &parts.test})
        for (const auto& bar : part->bars) {
            CHECK(bar.timestamp == series[i].timestamp);
            CHECK(bar.close == series[i].close);
            ++i;
        }
}

TEST_CASE("windows enumerates exactly the brute-force starts") {
    CHECK(windows(290, 100, 90, 90).size() == 2);
    CHECK(windows(290, 100, 90, 90)[0].lookback_begin == 0);
    CHECK(windows(290, 100, 90, 90)[1].lookback_begin == 90);
    CHECK(windows(190, 100, 90, 1).size() == 1);
    CHECK(windows(100, 100, 90, 1).empty());

    // property: count equals brute-force enumeration over a grid
    for (std::size_t n : {50u, 137u, 300u})
        for (std::size_t lb : {10u, 25u})
            for (std::size_t hz : {5u, 20u})
                for (std::size_t st : {1u, 7u, 20u}) {
                    std::size_t count = 0;
                    for (std::size_t s = 0; s + lb + hz <= n; s += st) ++count;
                    CHECK(windows(n, lb, hz, st).size() == count);
                }
}

TEST_CASE("synth noise-free drift is exact") {
    SynthConfig cfg;
    cfg.num_bars = 11;
    cfg.seed = 42;
    cfg.initial_price = 100.0;
    cfg.schedule = {{RegimeKind::Up, 10, 0.01, 0.0}};
    const auto series = synth_generate(cfg);
    REQUIRE(series.size() == 11);
    CHECK(series[10].close == doctest::Approx(100.0 * std::exp(0.1)).epsilon(1e-12));
}

TEST_CASE("synth is bit-identical for a fixed seed") {
    SynthConfig cfg;
    cfg.num_bars = 500;
    cfg.seed = 7;
    cfg.schedule = {{RegimeKind::Up, 100, 0.002, 0.01}, {RegimeKind::Down, 100, -0.002, 0.015}};
    const auto a = synth_generate(cfg);
    const auto b = synth_generate(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].close == b[i].close);
        CHECK(a[i].high == b[i].high);
        CHECK(a[i].low == b[i].low);
        CHECK(a[i].volume == b[i].volume);
    }
}

TEST_CASE("synth log returns obey the law of large numbers") {
    SynthConfig cfg;
    cfg.num_bars = 10001;
    cfg.seed = 42;
    cfg.schedule = {{RegimeKind::Flat, 10000, 0.0, 0.02}};
    const auto series = synth_generate(cfg);
    double sum = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i)
        sum += std::log(series[i].close / series[i - 1].close);
    const double mean = sum / 10000.0;
    CHECK(std::abs(mean) < 3.0 * 0.02 / std::sqrt(10000.0));
}

TEST_CASE("generated series satisfy bar invariants") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig cfg;
        cfg.num_bars = 300;
        cfg.seed = seed;
        cfg.schedule = {{RegimeKind::Up, 50, 0.003, 0.02},
                        {RegimeKind::Flat, 50, 0.0, 0.01},
                        {RegimeKind::Down, 50, -0.003, 0.02}};
        CHECK_NOTHROW(validate(synth_generate(cfg)));
    }
}

TEST_CASE("synth regime ground truth walks the schedule") {
    SynthConfig cfg;
    cfg.num_bars = 7;
    cfg.seed = 1;
    cfg.schedule = {{RegimeKind::Up, 2, 0.0, 0.0}, {RegimeKind::Down, 3, 0.0, 0.0}};
    const auto kinds = synth_regime_of_bar(cfg);
    REQUIRE(kinds.size() == 7);
    CHECK(kinds[1] == RegimeKind::Up);
    CHECK(kinds[2] == RegimeKind::Up);
    CHECK(kinds[3] == RegimeKind::Down);
    CHECK(kinds[5] == RegimeKind::Down);
    CHECK(kinds[6] == RegimeKind::Up);   // schedule cycles
}

TEST_CASE("csv round trip preserves the series to 12 digits") {
    const auto series = helpers::random_series(9, 40);
    write_csv(series, "/tmp/rt.csv");
    const auto loaded = load_csv("/tmp/rt.csv", {}, series.asset);
    REQUIRE(loaded.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(loaded[i].timestamp == series[i].timestamp);
        CHECK(loaded[i].close == doctest::Approx(series[i].close).epsilon(1e-11));
    }
}

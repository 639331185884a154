// Shared synthetic scenarios: golden-trace series for the eight adaptive
// strategies and the three-regime suite used by the learning and ablation
// experiments.
#pragma once

#include <cstdint>
#include <vector>

#include "mixbt/market_data.hpp"

namespace scenarios {

using mixbt::market_data::BarSeries;
using mixbt::market_data::RegimeKind;
using mixbt::market_data::RegimeSegment;
using mixbt::market_data::SynthConfig;

inline BarSeries from_schedule(std::uint64_t seed, std::vector<RegimeSegment> schedule,
                               const std::string& asset) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.schedule = std::move(schedule);
    cfg.num_bars = 1;
    for (const auto& seg : cfg.schedule) cfg.num_bars += seg.length;
    cfg.asset = asset;
    return mixbt::market_data::synth_generate(cfg);
}

struct GoldenScenario {
    const char* name;
    std::uint64_t seed;
    std::vector<RegimeSegment> schedule;
};

inline const std::vector<GoldenScenario>& golden_scenarios() {
    static const std::vector<GoldenScenario> list = {
        {"alg1_ma_cross", 101,
         {{RegimeKind::Flat, 40, 0.0, 0.01, 0.0},
          {RegimeKind::Up, 45, 0.012, 0.015, 0.0},
          {RegimeKind::Down, 45, -0.015, 0.02, 0.0},
          {RegimeKind::Up, 30, 0.01, 0.015, 0.0}}},
        {"alg2_momentum", 102,
         {{RegimeKind::Flat, 40, 0.0, 0.012, 0.0},
          {RegimeKind::Up, 50, 0.015, 0.02, 0.0},
          {RegimeKind::Down, 40, -0.012, 0.025, 0.0}}},
        {"alg3_turtle", 103,
         {{RegimeKind::Flat, 40, 0.0, 0.008, 0.0},
          {RegimeKind::Up, 60, 0.012, 0.018, 0.0},
          {RegimeKind::Down, 40, -0.01, 0.02, 0.0}}},
        {"alg4_boll", 104,
         {{RegimeKind::Flat, 50, 0.0, 0.02, 0.0},
          {RegimeKind::Down, 30, -0.012, 0.025, 0.0},
          {RegimeKind::Flat, 50, 0.0, 0.02, 0.0}}},
        {"alg5_rsi", 105,
         {{RegimeKind::Down, 45, -0.01, 0.02, 0.0},
          {RegimeKind::Up, 45, 0.01, 0.02, 0.0},
          {RegimeKind::Down, 40, -0.008, 0.025, 0.0}}},
        {"alg6_kdj", 106,
         {{RegimeKind::Down, 40, -0.012, 0.02, 0.0},
          {RegimeKind::Flat, 50, 0.0, 0.025, 0.0},
          {RegimeKind::Up, 40, 0.012, 0.02, 0.0}}},
        {"alg7_volume", 107,
         {{RegimeKind::Flat, 45, 0.0, 0.01, 0.0},
          {RegimeKind::Up, 50, 0.015, 0.02, 0.0},
          {RegimeKind::Flat, 35, 0.0, 0.015, 0.0}}},
        {"alg8_atr", 108,
         {{RegimeKind::Flat, 45, 0.0, 0.008, 0.0},
          {RegimeKind::Up, 45, 0.014, 0.02, 0.0},
          {RegimeKind::Down, 40, -0.014, 0.022, 0.0}}},
    };
    return list;
}

// Three-regime suite for the learning smoke test and the routing ablation:
// a smooth uptrend, a whipsaw downtrend (sharp bear-market rallies punish
// pyramiding shorts while a held short rides the net decline), and a
// mean-reverting range. 8101 bars; 60/20/20 split leaves ~50 training and
// ~15 test windows at the 100/90/90 window setting.
inline SynthConfig three_regime_suite(std::uint64_t seed) {
    SynthConfig sc;
    sc.seed = seed;
    sc.schedule.push_back({RegimeKind::Up, 270, 0.004, 0.008, 0.0});
    for (int z = 0; z < 30; ++z) {
        sc.schedule.push_back({RegimeKind::Down, 6, -0.025, 0.005, 0.0});
        sc.schedule.push_back({RegimeKind::Down, 3, 0.03, 0.005, 0.0});
    }
    sc.schedule.push_back({RegimeKind::Flat, 270, 0.0, 0.015, 0.06});
    sc.num_bars = 8101;
    sc.asset = "SUITE";
    return sc;
}

// Cleanly separated regimes for the labeler agreement check.
inline SynthConfig labeler_suite(std::uint64_t seed) {
    SynthConfig sc;
    sc.seed = seed;
    sc.schedule = {{RegimeKind::Up, 180, 0.005, 0.006, 0.0},
                   {RegimeKind::Flat, 180, 0.0, 0.012, 0.25},
                   {RegimeKind::Down, 180, -0.005, 0.006, 0.0}};
    sc.num_bars = 541;
    sc.asset = "LBL";
    return sc;
}

}  // namespace scenarios

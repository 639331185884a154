#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "mixbt/backtest.hpp"
#include "mixbt/baselines.hpp"
#include "mixbt/market_data.hpp"
#include "mixbt/router.hpp"
#include "mixbt/strategy.hpp"
#include "mixbt/training.hpp"

namespace mixbt::config {

using Json = nlohmann::ordered_json;

struct CsvSource {
    std::string path;
    std::string asset;
    market_data::CsvSchema schema;
};

struct WindowConfig {
    std::size_t lookback = 100;
    std::size_t horizon = 90;
    std::size_t stride = 90;
};

struct TrainingConfig {
    std::size_t episodes = 200;
    std::size_t batch_size = 16;
    std::size_t update_every = 4;
    double learning_rate = 3e-5;
    double router_learning_rate = 0.0;   // 0 -> learning_rate
    double baseline_decay = 0.9;
    std::size_t warm_start_epochs = 0;   // 0 disables the stage-1 warm start
    double warm_start_learning_rate = 0.5;
};

struct RunConfig {
    std::vector<CsvSource> csv_sources;
    std::vector<market_data::SynthConfig> synth_sources;
    WindowConfig window;
    market_data::SplitSpec split;
    backtest::ExecutionConfig execution;
    strategy::StrategyParams strategy_params;
    router::RouterMode router_mode = router::RouterMode::Dynamic;
    double router_temperature = 1.0;
    training::RewardConfig reward;
    TrainingConfig training;
    std::vector<std::uint64_t> seeds{42};
    std::vector<baselines::BaselineKind> baseline_kinds;   // empty -> all seven
    baselines::BaselineParams baseline_params;
    std::string checkpoint;                                // optional policy checkpoint to load
    double sharpe_periods_per_year = 0.0;                  // 0 disables SR annualization
    std::string output_dir = "out";
};

Json emit_config(const RunConfig& cfg);
RunConfig parse_config(const Json& j);
RunConfig load_config_file(const std::string& path);

// Loads every configured source (CSV then synthetic), validated.
std::vector<market_data::BarSeries> load_sources(const RunConfig& cfg);

training::TrainConfig to_train_config(const RunConfig& cfg, std::uint64_t seed);

// Policy checkpoints: router + four experts + reward config + seed, versioned.
struct Checkpoint {
    std::string version = "1";
    std::uint64_t seed = 0;
    router::RouterPolicy router;
    std::array<training::ExpertPolicy, 4> experts;
    training::RewardConfig reward;
};

Json emit_checkpoint(const Checkpoint& ck);
Checkpoint parse_checkpoint(const Json& j);
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// FNV-1a over the canonical config dump plus the code version; stamps reports.
std::string run_hash(const RunConfig& cfg, std::uint64_t seed);
extern const char* const kCodeVersion;

}  // namespace mixbt::config

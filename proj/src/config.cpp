#include "mixbt/config.hpp"

#include <fstream>
#include <stdexcept>

namespace mixbt::config {

const char* const kCodeVersion = "mixbt-0.1.0";

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

Json strategy_params_json(const strategy::StrategyParams& p) {
    Json j;
    j["ma_cross"] = {{"fast", p.ma_cross.fast},
                     {"slow", p.ma_cross.slow},
                     {"atr_period", p.ma_cross.atr_period},
                     {"atr_mult", p.ma_cross.atr_mult},
                     {"max_layers", p.ma_cross.max_layers},
                     {"trend_threshold", p.ma_cross.trend_threshold}};
    j["momentum"] = {{"lookback", p.momentum.lookback},
                     {"entry_threshold", p.momentum.entry_threshold},
                     {"exit_threshold", p.momentum.exit_threshold},
                     {"atr_period", p.momentum.atr_period},
                     {"atr_mult", p.momentum.atr_mult},
                     {"max_layers", p.momentum.max_layers},
                     {"rsi_long", p.momentum.rsi_long},
                     {"rsi_short", p.momentum.rsi_short}};
    j["turtle"] = {{"entry_period", p.turtle.entry_period},
                   {"exit_period", p.turtle.exit_period},
                   {"atr_period", p.turtle.atr_period},
                   {"atr_mult", p.turtle.atr_mult},
                   {"max_units", p.turtle.max_units},
                   {"take_profit", p.turtle.take_profit},
                   {"pyramid_atr_step", p.turtle.pyramid_atr_step}};
    j["boll"] = {{"period", p.boll.period},
                 {"k", p.boll.k},
                 {"atr_period", p.boll.atr_period},
                 {"atr_mult", p.boll.atr_mult},
                 {"max_layers", p.boll.max_layers}};
    j["rsi"] = {{"period", p.rsi.period},
                {"oversold", p.rsi.oversold},
                {"overbought", p.rsi.overbought},
                {"neutral", p.rsi.neutral},
                {"atr_period", p.rsi.atr_period},
                {"atr_mult", p.rsi.atr_mult},
                {"max_layers", p.rsi.max_layers},
                {"profit_target", p.rsi.profit_target}};
    j["kdj"] = {{"period", p.kdj.period},
                {"j_buy", p.kdj.j_buy},
                {"k_buy", p.kdj.k_buy},
                {"j_sell", p.kdj.j_sell},
                {"k_sell", p.kdj.k_sell},
                {"atr_period", p.kdj.atr_period},
                {"atr_mult", p.kdj.atr_mult},
                {"max_layers", p.kdj.max_layers},
                {"profit_target", p.kdj.profit_target}};
    j["volume"] = {{"price_window", p.volume.price_window},
                   {"volume_window", p.volume.volume_window},
                   {"ma_period", p.volume.ma_period},
                   {"volume_mult", p.volume.volume_mult},
                   {"atr_period", p.volume.atr_period},
                   {"atr_mult", p.volume.atr_mult},
                   {"max_layers", p.volume.max_layers},
                   {"exhaustion_ratio", p.volume.exhaustion_ratio}};
    j["atr"] = {{"ma_period", p.atr.ma_period},
                {"atr_period", p.atr.atr_period},
                {"entry_mult", p.atr.entry_mult},
                {"exit_mult", p.atr.exit_mult},
                {"stop_mult", p.atr.stop_mult},
                {"max_layers", p.atr.max_layers}};
    j["position"] = {{"long_fraction", p.position.long_fraction},
                     {"short_fraction", p.position.short_fraction}};
    j["base_entry_fraction"] = p.base_entry_fraction;
    j["confirmation_increment"] = p.confirmation_increment;
    return j;
}

strategy::StrategyParams strategy_params_from_json(const Json& j) {
    strategy::StrategyParams p;
    if (j.contains("ma_cross")) {
        const auto& m = j.at("ma_cross");
        p.ma_cross.fast = get_or(m, "fast", p.ma_cross.fast);
        p.ma_cross.slow = get_or(m, "slow", p.ma_cross.slow);
        p.ma_cross.atr_period = get_or(m, "atr_period", p.ma_cross.atr_period);
        p.ma_cross.atr_mult = get_or(m, "atr_mult", p.ma_cross.atr_mult);
        p.ma_cross.max_layers = get_or(m, "max_layers", p.ma_cross.max_layers);
        p.ma_cross.trend_threshold = get_or(m, "trend_threshold", p.ma_cross.trend_threshold);
    }
    if (j.contains("momentum")) {
        const auto& m = j.at("momentum");
        p.momentum.lookback = get_or(m, "lookback", p.momentum.lookback);
        p.momentum.entry_threshold = get_or(m, "entry_threshold", p.momentum.entry_threshold);
        p.momentum.exit_threshold = get_or(m, "exit_threshold", p.momentum.exit_threshold);
        p.momentum.atr_period = get_or(m, "atr_period", p.momentum.atr_period);
        p.momentum.atr_mult = get_or(m, "atr_mult", p.momentum.atr_mult);
        p.momentum.max_layers = get_or(m, "max_layers", p.momentum.max_layers);
        p.momentum.rsi_long = get_or(m, "rsi_long", p.momentum.rsi_long);
        p.momentum.rsi_short = get_or(m, "rsi_short", p.momentum.rsi_short);
    }
    if (j.contains("turtle")) {
        const auto& m = j.at("turtle");
        p.turtle.entry_period = get_or(m, "entry_period", p.turtle.entry_period);
        p.turtle.exit_period = get_or(m, "exit_period", p.turtle.exit_period);
        p.turtle.atr_period = get_or(m, "atr_period", p.turtle.atr_period);
        p.turtle.atr_mult = get_or(m, "atr_mult", p.turtle.atr_mult);
        p.turtle.max_units = get_or(m, "max_units", p.turtle.max_units);
        p.turtle.take_profit = get_or(m, "take_profit", p.turtle.take_profit);
        p.turtle.pyramid_atr_step = get_or(m, "pyramid_atr_step", p.turtle.pyramid_atr_step);
    }
    if (j.contains("boll")) {
        const auto& m = j.at("boll");
        p.boll.period = get_or(m, "period", p.boll.period);
        p.boll.k = get_or(m, "k", p.boll.k);
        p.boll.atr_period = get_or(m, "atr_period", p.boll.atr_period);
        p.boll.atr_mult = get_or(m, "atr_mult", p.boll.atr_mult);
        p.boll.max_layers = get_or(m, "max_layers", p.boll.max_layers);
    }
    if (j.contains("rsi")) {
        const auto& m = j.at("rsi");
        p.rsi.period = get_or(m, "period", p.rsi.period);
        p.rsi.oversold = get_or(m, "oversold", p.rsi.oversold);
        p.rsi.overbought = get_or(m, "overbought", p.rsi.overbought);
        p.rsi.neutral = get_or(m, "neutral", p.rsi.neutral);
        p.rsi.atr_period = get_or(m, "atr_period", p.rsi.atr_period);
        p.rsi.atr_mult = get_or(m, "atr_mult", p.rsi.atr_mult);
        p.rsi.max_layers = get_or(m, "max_layers", p.rsi.max_layers);
        p.rsi.profit_target = get_or(m, "profit_target", p.rsi.profit_target);
    }
    if (j.contains("kdj")) {
        const auto& m = j.at("kdj");
        p.kdj.period = get_or(m, "period", p.kdj.period);
        p.kdj.j_buy = get_or(m, "j_buy", p.kdj.j_buy);
        p.kdj.k_buy = get_or(m, "k_buy", p.kdj.k_buy);
        p.kdj.j_sell = get_or(m, "j_sell", p.kdj.j_sell);
        p.kdj.k_sell = get_or(m, "k_sell", p.kdj.k_sell);
        p.kdj.atr_period = get_or(m, "atr_period", p.kdj.atr_period);
        p.kdj.atr_mult = get_or(m, "atr_mult", p.kdj.atr_mult);
        p.kdj.max_layers = get_or(m, "max_layers", p.kdj.max_layers);
        p.kdj.profit_target = get_or(m, "profit_target", p.kdj.profit_target);
    }
    if (j.contains("volume")) {
        const auto& m = j.at("volume");
        p.volume.price_window = get_or(m, "price_window", p.volume.price_window);
        p.volume.volume_window = get_or(m, "volume_window", p.volume.volume_window);
        p.volume.ma_period = get_or(m, "ma_period", p.volume.ma_period);
        p.volume.volume_mult = get_or(m, "volume_mult", p.volume.volume_mult);
        p.volume.atr_period = get_or(m, "atr_period", p.volume.atr_period);
        p.volume.atr_mult = get_or(m, "atr_mult", p.volume.atr_mult);
        p.volume.max_layers = get_or(m, "max_layers", p.volume.max_layers);
        p.volume.exhaustion_ratio = get_or(m, "exhaustion_ratio", p.volume.exhaustion_ratio);
    }
    if (j.contains("atr")) {
        const auto& m = j.at("atr");
        p.atr.ma_period = get_or(m, "ma_period", p.atr.ma_period);
        p.atr.atr_period = get_or(m, "atr_period", p.atr.atr_period);
        p.atr.entry_mult = get_or(m, "entry_mult", p.atr.entry_mult);
        p.atr.exit_mult = get_or(m, "exit_mult", p.atr.exit_mult);
        p.atr.stop_mult = get_or(m, "stop_mult", p.atr.stop_mult);
        p.atr.max_layers = get_or(m, "max_layers", p.atr.max_layers);
    }
    if (j.contains("position")) {
        const auto& m = j.at("position");
        p.position.long_fraction = get_or(m, "long_fraction", p.position.long_fraction);
        p.position.short_fraction = get_or(m, "short_fraction", p.position.short_fraction);
    }
    p.base_entry_fraction = get_or(j, "base_entry_fraction", p.base_entry_fraction);
    p.confirmation_increment = get_or(j, "confirmation_increment", p.confirmation_increment);
    return p;
}

}  // namespace

Json emit_config(const RunConfig& cfg) {
    Json j;
    Json csv = Json::array();
    for (const auto& s : cfg.csv_sources) {
        csv.push_back({{"path", s.path},
                       {"asset", s.asset},
                       {"columns",
                        {{"date", s.schema.date},
                         {"open", s.schema.open},
                         {"high", s.schema.high},
                         {"low", s.schema.low},
                         {"close", s.schema.close},
                         {"volume", s.schema.volume}}}});
    }
    j["data"]["csv"] = csv;
    Json synth = Json::array();
    for (const auto& s : cfg.synth_sources) {
        Json seg = Json::array();
        for (const auto& r : s.schedule)
            seg.push_back({{"kind", market_data::to_string(r.kind)},
                           {"length", r.length},
                           {"drift", r.drift},
                           {"volatility", r.volatility},
                           {"reversion", r.reversion}});
        synth.push_back({{"asset", s.asset},
                         {"num_bars", s.num_bars},
                         {"seed", s.seed},
                         {"initial_price", s.initial_price},
                         {"schedule", seg}});
    }
    j["data"]["synth"] = synth;
    j["window"] = {{"lookback", cfg.window.lookback},
                   {"horizon", cfg.window.horizon},
                   {"stride", cfg.window.stride}};
    j["split"] = {{"train", cfg.split.train},
                  {"validation", cfg.split.validation},
                  {"test", cfg.split.test}};
    j["execution"] = {{"initial_cash", cfg.execution.initial_cash},
                      {"fee_rate", cfg.execution.fee_rate},
                      {"slippage", cfg.execution.slippage},
                      {"allow_short", cfg.execution.allow_short}};
    j["strategy_params"] = strategy_params_json(cfg.strategy_params);
    j["router"] = {{"mode", router::to_string(cfg.router_mode)},
                   {"temperature", cfg.router_temperature}};
    j["reward"] = {{"alpha_r", cfg.reward.alpha_r},
                   {"alpha_s", cfg.reward.alpha_s},
                   {"beta", cfg.reward.beta},
                   {"drawdown_penalty", cfg.reward.drawdown_penalty},
                   {"f_cap", cfg.reward.f_cap},
                   {"g_cap", cfg.reward.g_cap},
                   {"c1", cfg.reward.c1},
                   {"c2", cfg.reward.c2},
                   {"c3", cfg.reward.c3},
                   {"gamma", cfg.reward.gamma},
                   {"clip_epsilon", cfg.reward.clip_epsilon}};
    j["training"] = {{"episodes", cfg.training.episodes},
                     {"batch_size", cfg.training.batch_size},
                     {"update_every", cfg.training.update_every},
                     {"learning_rate", cfg.training.learning_rate},
                     {"router_learning_rate", cfg.training.router_learning_rate},
                     {"baseline_decay", cfg.training.baseline_decay},
                     {"warm_start_epochs", cfg.training.warm_start_epochs},
                     {"warm_start_learning_rate", cfg.training.warm_start_learning_rate}};
    j["seeds"] = cfg.seeds;
    Json bl = Json::array();
    for (auto k : cfg.baseline_kinds) bl.push_back(baselines::to_string(k));
    j["baselines"] = bl;
    j["baseline_params"] = {{"wr_period", cfg.baseline_params.wr_period},
                            {"bias_period", cfg.baseline_params.bias_period},
                            {"long_short", cfg.baseline_params.long_short}};
    j["checkpoint"] = cfg.checkpoint;
    j["sharpe_periods_per_year"] = cfg.sharpe_periods_per_year;
    j["output_dir"] = cfg.output_dir;
    return j;
}

RunConfig parse_config(const Json& j) {
    RunConfig cfg;
    if (j.contains("data")) {
        const auto& data = j.at("data");
        for (const auto& s : data.value("csv", Json::array())) {
            CsvSource src;
            src.path = s.at("path").get<std::string>();
            src.asset = s.value("asset", src.path);
            if (s.contains("columns")) {
                const auto& c = s.at("columns");
                src.schema.date = c.value("date", src.schema.date);
                src.schema.open = c.value("open", src.schema.open);
                src.schema.high = c.value("high", src.schema.high);
                src.schema.low = c.value("low", src.schema.low);
                src.schema.close = c.value("close", src.schema.close);
                src.schema.volume = c.value("volume", src.schema.volume);
            }
            cfg.csv_sources.push_back(std::move(src));
        }
        for (const auto& s : data.value("synth", Json::array())) {
            market_data::SynthConfig sc;
            sc.asset = s.value("asset", std::string("SYNTH"));
            sc.num_bars = s.at("num_bars").get<std::size_t>();
            sc.seed = s.value("seed", std::uint64_t{42});
            sc.initial_price = s.value("initial_price", 100.0);
            for (const auto& seg : s.at("schedule")) {
                market_data::RegimeSegment r;
                r.kind = market_data::regime_kind_from_string(seg.at("kind").get<std::string>());
                r.length = seg.at("length").get<std::size_t>();
                r.drift = seg.value("drift", 0.0);
                r.volatility = seg.value("volatility", 0.0);
                r.reversion = seg.value("reversion", 0.0);
                sc.schedule.push_back(r);
            }
            if (!sc.valid()) throw std::invalid_argument("config: invalid synth source");
            cfg.synth_sources.push_back(std::move(sc));
        }
    }
    if (j.contains("window")) {
        const auto& w = j.at("window");
        cfg.window.lookback = get_or(w, "lookback", cfg.window.lookback);
        cfg.window.horizon = get_or(w, "horizon", cfg.window.horizon);
        cfg.window.stride = get_or(w, "stride", cfg.window.stride);
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        cfg.split.train = get_or(s, "train", cfg.split.train);
        cfg.split.validation = get_or(s, "validation", cfg.split.validation);
        cfg.split.test = get_or(s, "test", cfg.split.test);
        if (!cfg.split.valid())
            throw std::invalid_argument("config: split fractions must be positive and sum to 1");
    }
    if (j.contains("execution")) {
        const auto& e = j.at("execution");
        cfg.execution.initial_cash = get_or(e, "initial_cash", cfg.execution.initial_cash);
        cfg.execution.fee_rate = get_or(e, "fee_rate", cfg.execution.fee_rate);
        cfg.execution.slippage = get_or(e, "slippage", cfg.execution.slippage);
        cfg.execution.allow_short = get_or(e, "allow_short", cfg.execution.allow_short);
        if (cfg.execution.fee_rate < 0.0 || cfg.execution.slippage < 0.0)
            throw std::invalid_argument("config: fee_rate and slippage must be non-negative");
    }
    if (j.contains("strategy_params"))
        cfg.strategy_params = strategy_params_from_json(j.at("strategy_params"));
    if (j.contains("router")) {
        const auto& r = j.at("router");
        cfg.router_mode = router::router_mode_from_string(r.value("mode", std::string("dynamic")));
        cfg.router_temperature = get_or(r, "temperature", cfg.router_temperature);
        if (cfg.router_temperature <= 0.0)
            throw std::invalid_argument("config: router temperature must be positive");
    }
    if (j.contains("reward")) {
        const auto& r = j.at("reward");
        cfg.reward.alpha_r = get_or(r, "alpha_r", cfg.reward.alpha_r);
        cfg.reward.alpha_s = get_or(r, "alpha_s", cfg.reward.alpha_s);
        cfg.reward.beta = get_or(r, "beta", cfg.reward.beta);
        cfg.reward.drawdown_penalty = get_or(r, "drawdown_penalty", cfg.reward.drawdown_penalty);
        cfg.reward.f_cap = get_or(r, "f_cap", cfg.reward.f_cap);
        cfg.reward.g_cap = get_or(r, "g_cap", cfg.reward.g_cap);
        cfg.reward.c1 = get_or(r, "c1", cfg.reward.c1);
        cfg.reward.c2 = get_or(r, "c2", cfg.reward.c2);
        cfg.reward.c3 = get_or(r, "c3", cfg.reward.c3);
        cfg.reward.gamma = get_or(r, "gamma", cfg.reward.gamma);
        cfg.reward.clip_epsilon = get_or(r, "clip_epsilon", cfg.reward.clip_epsilon);
        if (!cfg.reward.valid()) throw std::invalid_argument("config: invalid reward config");
    }
    if (j.contains("training")) {
        const auto& t = j.at("training");
        cfg.training.episodes = get_or(t, "episodes", cfg.training.episodes);
        cfg.training.batch_size = get_or(t, "batch_size", cfg.training.batch_size);
        cfg.training.update_every = get_or(t, "update_every", cfg.training.update_every);
        cfg.training.learning_rate = get_or(t, "learning_rate", cfg.training.learning_rate);
        cfg.training.router_learning_rate =
            get_or(t, "router_learning_rate", cfg.training.router_learning_rate);
        cfg.training.baseline_decay = get_or(t, "baseline_decay", cfg.training.baseline_decay);
        cfg.training.warm_start_epochs =
            get_or(t, "warm_start_epochs", cfg.training.warm_start_epochs);
        cfg.training.warm_start_learning_rate =
            get_or(t, "warm_start_learning_rate", cfg.training.warm_start_learning_rate);
    }
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("baselines"))
        for (const auto& s : j.at("baselines"))
            cfg.baseline_kinds.push_back(baselines::baseline_from_string(s.get<std::string>()));
    if (j.contains("baseline_params")) {
        const auto& b = j.at("baseline_params");
        cfg.baseline_params.wr_period = get_or(b, "wr_period", cfg.baseline_params.wr_period);
        cfg.baseline_params.bias_period = get_or(b, "bias_period", cfg.baseline_params.bias_period);
        cfg.baseline_params.long_short = get_or(b, "long_short", cfg.baseline_params.long_short);
    }
    cfg.checkpoint = j.value("checkpoint", cfg.checkpoint);
    cfg.sharpe_periods_per_year =
        j.value("sharpe_periods_per_year", cfg.sharpe_periods_per_year);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: JSON parse error in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

std::vector<market_data::BarSeries> load_sources(const RunConfig& cfg) {
    std::vector<market_data::BarSeries> out;
    for (const auto& src : cfg.csv_sources) {
        auto series = market_data::load_csv(src.path, src.schema, src.asset);
        market_data::validate(series);
        out.push_back(std::move(series));
    }
    for (const auto& sc : cfg.synth_sources) out.push_back(market_data::synth_generate(sc));
    if (out.empty()) throw std::invalid_argument("config: no data sources configured");
    return out;
}

training::TrainConfig to_train_config(const RunConfig& cfg, std::uint64_t seed) {
    training::TrainConfig tc;
    tc.episodes = cfg.training.episodes;
    tc.batch_size = cfg.training.batch_size;
    tc.update_every = cfg.training.update_every;
    tc.learning_rate = cfg.training.learning_rate;
    tc.router_learning_rate = cfg.training.router_learning_rate;
    tc.baseline_decay = cfg.training.baseline_decay;
    tc.seed = seed;
    tc.lookback = cfg.window.lookback;
    tc.horizon = cfg.window.horizon;
    tc.stride = cfg.window.stride;
    tc.reward = cfg.reward;
    tc.execution = cfg.execution;
    tc.strategy_params = cfg.strategy_params;
    return tc;
}

namespace {

Json expert_json(const training::ExpertPolicy& p) {
    return {{"family", strategy::to_string(p.family)},
            {"obs_dim", p.obs_dim},
            {"weights", p.weights},
            {"bias", p.bias},
            {"value_weights", p.value_weights},
            {"value_bias", p.value_bias}};
}

training::ExpertPolicy expert_from_json(const Json& j) {
    training::ExpertPolicy p;
    p.family = strategy::family_from_string(j.at("family").get<std::string>());
    p.obs_dim = j.at("obs_dim").get<std::size_t>();
    p.weights = j.at("weights").get<std::vector<double>>();
    p.bias = j.at("bias").get<std::array<double, strategy::kActionCount>>();
    p.value_weights = j.at("value_weights").get<std::vector<double>>();
    p.value_bias = j.at("value_bias").get<double>();
    return p;
}

}  // namespace

Json emit_checkpoint(const Checkpoint& ck) {
    Json j;
    j["version"] = ck.version;
    j["seed"] = ck.seed;
    j["router"] = {{"mode", router::to_string(ck.router.mode)},
                   {"obs_dim", ck.router.obs_dim},
                   {"phi", ck.router.phi},
                   {"bias", ck.router.bias},
                   {"temperature", ck.router.temperature},
                   {"seed", ck.router.seed}};
    Json experts = Json::array();
    for (const auto& e : ck.experts) experts.push_back(expert_json(e));
    j["experts"] = experts;
    j["reward"] = {{"alpha_r", ck.reward.alpha_r},
                   {"alpha_s", ck.reward.alpha_s},
                   {"beta", ck.reward.beta},
                   {"drawdown_penalty", ck.reward.drawdown_penalty},
                   {"f_cap", ck.reward.f_cap},
                   {"g_cap", ck.reward.g_cap},
                   {"c1", ck.reward.c1},
                   {"c2", ck.reward.c2},
                   {"c3", ck.reward.c3},
                   {"gamma", ck.reward.gamma},
                   {"clip_epsilon", ck.reward.clip_epsilon}};
    return j;
}

Checkpoint parse_checkpoint(const Json& j) {
    Checkpoint ck;
    ck.version = j.value("version", std::string("1"));
    ck.seed = j.value("seed", std::uint64_t{0});
    const auto& r = j.at("router");
    ck.router.mode = router::router_mode_from_string(r.at("mode").get<std::string>());
    ck.router.obs_dim = r.at("obs_dim").get<std::size_t>();
    ck.router.phi = r.at("phi").get<std::vector<double>>();
    ck.router.bias = r.at("bias").get<std::array<double, 4>>();
    ck.router.temperature = r.at("temperature").get<double>();
    ck.router.seed = r.at("seed").get<std::uint64_t>();
    std::size_t i = 0;
    for (const auto& e : j.at("experts")) {
        if (i >= 4) break;
        ck.experts[i++] = expert_from_json(e);
    }
    if (j.contains("reward")) {
        const auto& rw = j.at("reward");
        ck.reward.alpha_r = rw.value("alpha_r", ck.reward.alpha_r);
        ck.reward.alpha_s = rw.value("alpha_s", ck.reward.alpha_s);
        ck.reward.beta = rw.value("beta", ck.reward.beta);
        ck.reward.drawdown_penalty = rw.value("drawdown_penalty", ck.reward.drawdown_penalty);
        ck.reward.f_cap = rw.value("f_cap", ck.reward.f_cap);
        ck.reward.g_cap = rw.value("g_cap", ck.reward.g_cap);
        ck.reward.c1 = rw.value("c1", ck.reward.c1);
        ck.reward.c2 = rw.value("c2", ck.reward.c2);
        ck.reward.c3 = rw.value("c3", ck.reward.c3);
        ck.reward.gamma = rw.value("gamma", ck.reward.gamma);
        ck.reward.clip_epsilon = rw.value("clip_epsilon", ck.reward.clip_epsilon);
    }
    return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("checkpoint: cannot open '" + path + "' for writing");
    out << emit_checkpoint(ck).dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("checkpoint: cannot open '" + path + "'");
    Json j;
    in >> j;
    return parse_checkpoint(j);
}

std::string run_hash(const RunConfig& cfg, std::uint64_t seed) {
    const std::string dump = emit_config(cfg).dump() + "#" + std::to_string(seed) + "#" +
                             kCodeVersion;
    std::uint64_t h = 1469598103934665603ULL;   // FNV-1a 64
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mixbt::config

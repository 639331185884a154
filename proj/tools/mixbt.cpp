// mixbt: mixture-of-experts backtesting engine CLI.
// Exit codes: 0 ok, 2 config error, 3 runtime abort.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <cmath>
#include <numeric>

#include "CLI11.hpp"

#include "mixbt/config.hpp"
#include "mixbt/evaluate.hpp"
#include "mixbt/kernels.hpp"
#include "mixbt/report.hpp"
#include "mixbt/rng.hpp"

namespace {

using namespace mixbt;
using config::Json;
using config::RunConfig;

// Experiment commands re-seed synthetic sources per run seed so multi-seed
// studies see independent realizations; CSV sources are fixed data.
std::vector<market_data::BarSeries> load_sources_seeded(const RunConfig& cfg,
                                                        std::uint64_t run_seed) {
    RunConfig c = cfg;
    for (auto& s : c.synth_sources) s.seed = rng::mix(s.seed, run_seed);
    return config::load_sources(c);
}

evaluate::EvalConfig eval_config(const RunConfig& cfg) {
    evaluate::EvalConfig ec;
    ec.lookback = cfg.window.lookback;
    ec.horizon = cfg.window.horizon;
    ec.stride = cfg.window.stride;
    ec.execution = cfg.execution;
    ec.strategy_params = cfg.strategy_params;
    return ec;
}

struct TrainedPolicies {
    router::RouterPolicy router;
    std::array<training::ExpertPolicy, 4> experts;
    training::TrainResult result;
};

TrainedPolicies train_for_seed(const RunConfig& cfg, std::uint64_t seed) {
    auto assets = load_sources_seeded(cfg, seed);
    std::vector<market_data::BarSeries> train_parts;
    for (const auto& a : assets) train_parts.push_back(market_data::split(a, cfg.split).train);

    std::optional<router::RouterPolicy> initial;
    if (cfg.training.warm_start_epochs > 0) {
        std::vector<training::LabeledObservation> labeled;
        for (const auto& part : train_parts) {
            auto rows = evaluate::build_labeled_windows(part, eval_config(cfg));
            labeled.insert(labeled.end(), rows.begin(), rows.end());
        }
        auto policy = router::RouterPolicy::make(router::RouterMode::Dynamic,
                                                 router::kObservationDim, seed);
        policy.temperature = cfg.router_temperature;
        training::warm_start(policy, labeled, cfg.training.warm_start_epochs,
                             cfg.training.warm_start_learning_rate);
        initial = policy;
    }

    auto tc = config::to_train_config(cfg, seed);
    TrainedPolicies tp{router::RouterPolicy{}, {}, training::train_loop(train_parts, tc, initial)};
    tp.router = tp.result.router;
    tp.router.temperature = cfg.router_temperature;
    tp.experts = tp.result.experts;
    return tp;
}

int cmd_ingest(const RunConfig& cfg) {
    report::ensure_dir(cfg.output_dir);
    Json rep;
    rep["command"] = "ingest";
    rep["config_hash"] = config::run_hash(cfg, cfg.seeds.empty() ? 0 : cfg.seeds[0]);
    Json assets = Json::array();
    for (const auto& src : cfg.csv_sources) {
        auto series = market_data::load_csv(src.path, src.schema, src.asset);
        market_data::validate(series);
        const std::string out_path = cfg.output_dir + "/" + series.asset + ".csv";
        market_data::write_csv(series, out_path);
        assets.push_back({{"asset", series.asset},
                          {"rows", series.size()},
                          {"first", market_data::format_iso_date(series.bars.front().timestamp)},
                          {"last", market_data::format_iso_date(series.bars.back().timestamp)},
                          {"written", out_path}});
        std::printf("ingested %s: %zu rows\n", series.asset.c_str(), series.size());
    }
    rep["assets"] = assets;
    report::write_json_file(cfg.output_dir + "/ingest_report.json", rep);
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    if (cfg.synth_sources.empty()) throw std::invalid_argument("synth: no synthetic sources configured");
    report::ensure_dir(cfg.output_dir);
    for (const auto& sc : cfg.synth_sources) {
        const auto series = market_data::synth_generate(sc);
        market_data::write_csv(series, cfg.output_dir + "/" + series.asset + ".csv");
        const auto kinds = market_data::synth_regime_of_bar(sc);
        std::ofstream out(cfg.output_dir + "/" + series.asset + "_regimes.csv");
        out << "date,regime\n";
        for (std::size_t i = 0; i < series.size(); ++i)
            out << market_data::format_iso_date(series[i].timestamp) << ','
                << market_data::to_string(kinds[i]) << '\n';
        std::printf("generated %s: %zu bars\n", series.asset.c_str(), series.size());
    }
    return 0;
}

int cmd_label(const RunConfig& cfg) {
    report::ensure_dir(cfg.output_dir);
    const auto assets = config::load_sources(cfg);
    std::vector<std::tuple<std::string, std::string, std::string>> rows;
    const auto ec = eval_config(cfg);
    for (const auto& series : assets) {
        for (const auto& w : market_data::windows(series.size(), ec.lookback, ec.horizon,
                                                  ec.stride)) {
            if (w.horizon_begin < regime::kClassifyWarmup) continue;
            const auto label = regime::label_window(series, w);
            rows.emplace_back(series.asset,
                              market_data::format_iso_date(series[w.horizon_begin].timestamp),
                              regime::to_string(label));
        }
    }
    report::write_labels_csv(cfg.output_dir + "/labels.csv", rows);
    std::printf("labeled %zu windows -> %s/labels.csv\n", rows.size(), cfg.output_dir.c_str());
    return 0;
}

int cmd_backtest(const RunConfig& cfg) {
    report::ensure_dir(cfg.output_dir);
    const std::uint64_t seed = cfg.seeds.empty() ? 42 : cfg.seeds[0];

    router::RouterPolicy policy = router::RouterPolicy::make(cfg.router_mode,
                                                             router::kObservationDim, seed);
    policy.temperature = cfg.router_temperature;
    std::array<training::ExpertPolicy, 4> experts;
    for (std::size_t i = 0; i < 4; ++i)
        experts[i] = training::ExpertPolicy::make(strategy::family_from_index(i));
    if (!cfg.checkpoint.empty()) {
        const auto ck = config::load_checkpoint(cfg.checkpoint);
        policy = ck.router;
        policy.mode = cfg.router_mode;
        policy.temperature = cfg.router_temperature;
        experts = ck.experts;
    }

    Json rep;
    rep["command"] = "backtest";
    rep["schema_version"] = "1";
    rep["config"] = config::emit_config(cfg);
    rep["run_hash"] = config::run_hash(cfg, seed);
    rep["router_mode"] = router::to_string(cfg.router_mode);
    rep["kernels_backend"] = kernels::backend_name(kernels::active_backend());
    Json assets_json = Json::array();

    const auto assets = config::load_sources(cfg);
    const auto ec = eval_config(cfg);
    auto baseline_kinds = cfg.baseline_kinds;
    if (baseline_kinds.empty())
        baseline_kinds.assign(baselines::all_baselines().begin(), baselines::all_baselines().end());

    for (const auto& series : assets) {
        const auto parts = market_data::split(series, cfg.split);
        const auto prep = evaluate::prepare_series(parts.test, ec);
        if (prep.windows.empty())
            throw std::runtime_error("backtest: no usable test windows for '" + series.asset + "'");
        const auto eval = evaluate::evaluate_portfolio(prep, policy, experts,
                                                       cfg.execution.initial_cash);

        Json aj;
        aj["asset"] = series.asset;
        aj["test_bars"] = parts.test.size();
        aj["portfolio"] = report::metrics_json(eval.metrics);
        if (cfg.sharpe_periods_per_year > 0.0 && eval.metrics.sharpe)
            aj["portfolio"]["sharpe_annualized"] =
                *eval.metrics.sharpe * std::sqrt(cfg.sharpe_periods_per_year);
        Json windows_json = Json::array();
        for (std::size_t wi = 0; wi < prep.windows.size(); ++wi) {
            const auto& wd = prep.windows[wi];
            Json wj;
            wj["start"] = market_data::format_iso_date(parts.test[wd.ref.horizon_begin].timestamp);
            wj["return"] = eval.window_returns[wi];
            wj["weights"] = eval.weights[wi];
            Json chosen = Json::array();
            for (auto a : eval.chosen[wi]) chosen.push_back(strategy::to_string(a));
            wj["chosen"] = chosen;
            windows_json.push_back(wj);
        }
        aj["windows"] = windows_json;

        const std::size_t first_bar = prep.windows.front().ref.horizon_begin;
        report::write_equity_csv(cfg.output_dir + "/" + series.asset + "_equity.csv", parts.test,
                                 first_bar, eval.equity);
        report::write_equity_tsv(cfg.output_dir + "/plot_equity_" + series.asset + ".tsv",
                                 parts.test, first_bar, eval.equity);

        // Baselines run over the same contiguous evaluation span.
        market_data::WindowRef span;
        span.lookback_begin = prep.windows.front().ref.lookback_begin;
        span.horizon_begin = prep.windows.front().ref.horizon_begin;
        span.horizon_end = prep.windows.back().ref.horizon_end;
        Json bj = Json::array();
        for (const auto kind : baseline_kinds) {
            const auto res = baselines::run_baseline(kind, parts.test, span, cfg.execution,
                                                     cfg.baseline_params);
            Json one = report::backtest_result_json(res);
            one["trades"] = res.trades.size();   // full logs stay in the CSVs
            bj.push_back(one);
            report::write_equity_csv(cfg.output_dir + "/" + series.asset + "_baseline_" +
                                         baselines::to_string(kind) + "_equity.csv",
                                     parts.test, span.horizon_begin, res.equity_curve);
        }
        aj["baselines"] = bj;
        assets_json.push_back(aj);
        std::printf("%s: TR %s%% MDD %s%% over %zu windows\n", series.asset.c_str(),
                    report::format_pct(eval.metrics.total_return).c_str(),
                    report::format_pct(eval.metrics.max_drawdown).c_str(), prep.windows.size());
    }
    rep["assets"] = assets_json;
    report::write_json_file(cfg.output_dir + "/report.json", rep);
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    report::ensure_dir(cfg.output_dir);
    Json rep;
    rep["command"] = "train";
    rep["config"] = config::emit_config(cfg);
    Json per_seed = Json::array();

    for (const auto seed : cfg.seeds) {
        const auto tp = train_for_seed(cfg, seed);
        config::Checkpoint ck;
        ck.seed = seed;
        ck.router = tp.router;
        ck.experts = tp.experts;
        ck.reward = cfg.reward;
        const std::string ck_path =
            cfg.output_dir + "/checkpoint_seed" + std::to_string(seed) + ".json";
        config::save_checkpoint(ck, ck_path);
        report::write_learning_curve_csv(
            cfg.output_dir + "/curve_seed" + std::to_string(seed) + ".csv", tp.result.curve);

        const auto& curve = tp.result.curve;
        auto mean_range = [&](std::size_t b, std::size_t e) {
            double s = 0.0;
            for (std::size_t i = b; i < e && i < curve.size(); ++i)
                s += curve[i].mean_aggregated_return;
            return e > b ? s / static_cast<double>(std::min(e, curve.size()) - b) : 0.0;
        };
        const std::size_t n = curve.size();
        Json sj;
        sj["seed"] = seed;
        sj["run_hash"] = config::run_hash(cfg, seed);
        sj["episodes_run"] = tp.result.episodes_run;
        sj["diverged"] = tp.result.diverged;
        sj["first50_mean_reward"] = mean_range(0, std::min<std::size_t>(50, n));
        sj["last50_mean_reward"] = mean_range(n > 50 ? n - 50 : 0, n);
        sj["checkpoint"] = ck_path;
        per_seed.push_back(sj);
        std::printf("seed %llu: %zu episodes, first50 %.4f last50 %.4f%s\n",
                    static_cast<unsigned long long>(seed), tp.result.episodes_run,
                    sj["first50_mean_reward"].get<double>(), sj["last50_mean_reward"].get<double>(),
                    tp.result.diverged ? " (diverged)" : "");
    }
    rep["seeds"] = per_seed;
    report::write_json_file(cfg.output_dir + "/train_report.json", rep);
    return 0;
}

int cmd_ablate_routing(const RunConfig& cfg) {
    report::ensure_dir(cfg.output_dir);
    const std::array<router::RouterMode, 4> modes = {
        router::RouterMode::Dynamic, router::RouterMode::Uniform, router::RouterMode::BestExpert,
        router::RouterMode::Random};

    std::array<std::vector<double>, 4> tr, sr, mdd;
    Json per_seed = Json::array();

    for (const auto seed : cfg.seeds) {
        const auto tp = train_for_seed(cfg, seed);
        auto assets = load_sources_seeded(cfg, seed);
        const auto ec = eval_config(cfg);

        Json seed_json;
        seed_json["seed"] = seed;
        Json mode_json = Json::object();
        for (std::size_t m = 0; m < modes.size(); ++m) {
            double tr_sum = 0.0, sr_sum = 0.0, mdd_sum = 0.0;
            std::array<double, 4> weight_sum{};
            std::size_t count = 0, weight_count = 0;
            for (const auto& series : assets) {
                const auto parts = market_data::split(series, cfg.split);
                const auto prep = evaluate::prepare_series(parts.test, ec);
                if (prep.windows.empty()) continue;
                router::RouterPolicy policy = tp.router;
                policy.mode = modes[m];
                policy.seed = rng::mix(seed, 991, m);
                const auto eval = evaluate::evaluate_portfolio(prep, policy, tp.experts,
                                                               cfg.execution.initial_cash);
                tr_sum += eval.metrics.total_return;
                sr_sum += eval.metrics.sharpe.value_or(0.0);
                mdd_sum += eval.metrics.max_drawdown;
                for (const auto& w : eval.weights) {
                    for (std::size_t i = 0; i < 4; ++i) weight_sum[i] += w[i];
                    ++weight_count;
                }
                ++count;
            }
            if (count == 0) throw std::runtime_error("ablate-routing: no usable test windows");
            const double inv = 1.0 / static_cast<double>(count);
            tr[m].push_back(tr_sum * inv);
            sr[m].push_back(sr_sum * inv);
            mdd[m].push_back(mdd_sum * inv);
            Json weights_json = Json::array();
            for (double wsum : weight_sum)
                weights_json.push_back(weight_count ? wsum / static_cast<double>(weight_count)
                                                    : 0.0);
            mode_json[router::to_string(modes[m])] = {{"tr", tr_sum * inv},
                                                      {"sr", sr_sum * inv},
                                                      {"mdd", mdd_sum * inv},
                                                      {"mean_weights", weights_json}};
        }
        seed_json["modes"] = mode_json;
        per_seed.push_back(seed_json);
    }

    std::vector<report::RoutingRow> rows;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        report::RoutingRow row;
        row.mode = router::to_string(modes[m]);
        const auto mean = [](const std::vector<double>& v) {
            return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) /
                                         static_cast<double>(v.size());
        };
        row.tr = mean(tr[m]);
        row.sr = mean(sr[m]);
        row.mdd = mean(mdd[m]);
        rows.push_back(row);
        std::printf("%-12s TR %s%%  SR %s  MDD %s%%\n", row.mode.c_str(),
                    report::format_pct(row.tr).c_str(), report::format_num(row.sr, 2).c_str(),
                    report::format_pct(row.mdd).c_str());
    }
    Json extra;
    extra["seeds"] = cfg.seeds;
    extra["per_seed"] = per_seed;
    extra["run_hash"] = config::run_hash(cfg, cfg.seeds.empty() ? 0 : cfg.seeds[0]);
    report::write_routing_table(cfg.output_dir + "/routing_table.json",
                                cfg.output_dir + "/routing_table.tsv", rows, extra);
    return 0;
}

int cmd_ablate_modality(const RunConfig& cfg) {
    report::ensure_dir(cfg.output_dir);
    const std::array<router::ObservationVariant, 4> variants = {
        router::ObservationVariant::Full, router::ObservationVariant::SummaryOnly,
        router::ObservationVariant::MatrixTailOnly, router::ObservationVariant::Zero};
    const std::size_t epochs =
        cfg.training.warm_start_epochs > 0 ? cfg.training.warm_start_epochs : 300;

    std::array<std::vector<double>, 4> acc;
    Json per_seed = Json::array();
    const auto ec = eval_config(cfg);

    for (const auto seed : cfg.seeds) {
        auto assets = load_sources_seeded(cfg, seed);
        Json seed_json;
        seed_json["seed"] = seed;
        Json variant_json = Json::object();
        for (std::size_t v = 0; v < variants.size(); ++v) {
            std::vector<training::LabeledObservation> train_set, test_set;
            for (const auto& series : assets) {
                const auto parts = market_data::split(series, cfg.split);
                auto tr_rows = evaluate::build_labeled_windows(parts.train, ec, variants[v]);
                auto te_rows = evaluate::build_labeled_windows(parts.test, ec, variants[v]);
                train_set.insert(train_set.end(), tr_rows.begin(), tr_rows.end());
                test_set.insert(test_set.end(), te_rows.begin(), te_rows.end());
            }
            if (train_set.empty() || test_set.empty())
                throw std::runtime_error("ablate-modality: not enough labeled windows");
            auto clf = training::RegimeClassifier::make(router::kObservationDim);
            training::train_classifier(clf, train_set, epochs,
                                       cfg.training.warm_start_learning_rate);
            const double a = training::classifier_accuracy(clf, test_set);
            acc[v].push_back(a);
            variant_json[router::to_string(variants[v])] = a;
        }
        seed_json["accuracy"] = variant_json;
        per_seed.push_back(seed_json);
    }

    Json rep;
    rep["command"] = "ablate-modality";
    rep["per_seed"] = per_seed;
    Json rows = Json::array();
    std::string tsv = "variant\taccuracy%\n";
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const double mean = acc[v].empty()
                                ? 0.0
                                : std::accumulate(acc[v].begin(), acc[v].end(), 0.0) /
                                      static_cast<double>(acc[v].size());
        rows.push_back({{"variant", router::to_string(variants[v])}, {"accuracy", mean}});
        tsv += router::to_string(variants[v]) + "\t" + report::format_pct(mean) + "\n";
        std::printf("%-18s accuracy %s%%\n", router::to_string(variants[v]).c_str(),
                    report::format_pct(mean).c_str());
    }
    rep["rows"] = rows;
    rep["run_hash"] = config::run_hash(cfg, cfg.seeds.empty() ? 0 : cfg.seeds[0]);
    report::write_json_file(cfg.output_dir + "/modality_table.json", rep);
    report::write_text_file(cfg.output_dir + "/modality_table.tsv", tsv);
    return 0;
}

int cmd_report(const std::string& run_dir) {
    bool found = false;
    for (const char* name : {"report.json", "train_report.json", "routing_table.json",
                             "modality_table.json", "ingest_report.json"}) {
        const std::string path = run_dir + "/" + name;
        std::ifstream in(path);
        if (!in) continue;
        found = true;
        Json j;
        in >> j;
        std::printf("== %s ==\n%s\n", name, j.dump(2).c_str());
    }
    if (!found) throw std::invalid_argument("report: no report files under '" + run_dir + "'");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixture-of-experts backtesting engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::vector<std::uint64_t> seed_override;
    std::vector<std::string> baseline_override;
    std::string run_dir;

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        if (needs_config)
            cmd->add_option("--config", config_path, "run configuration JSON")->required();
        cmd->add_option("--out", out_override, "override output directory");
        cmd->add_option("--seed", seed_override, "override the seed list");
    };

    auto* ingest = app.add_subcommand("ingest", "load + validate CSV sources");
    auto* synth = app.add_subcommand("synth", "generate synthetic series");
    auto* label = app.add_subcommand("label", "emit per-window regime labels");
    auto* backtest_cmd = app.add_subcommand("backtest", "run experts and baselines on the test split");
    auto* ablate_r = app.add_subcommand("ablate-routing", "compare the four routing modes");
    auto* ablate_m = app.add_subcommand("ablate-modality", "compare observation variants");
    auto* train = app.add_subcommand("train", "run the hybrid training loop");
    auto* report_cmd = app.add_subcommand("report", "print stored reports");
    for (auto* cmd : {ingest, synth, label, backtest_cmd, ablate_r, ablate_m, train})
        add_common(cmd);
    backtest_cmd->add_option("--baseline", baseline_override,
                             "restrict baselines to these kinds (repeatable)");
    report_cmd->add_option("--run", run_dir, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (report_cmd->parsed()) return cmd_report(run_dir);

        RunConfig cfg = config::load_config_file(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (!seed_override.empty()) cfg.seeds = seed_override;
        if (!baseline_override.empty()) {
            cfg.baseline_kinds.clear();
            for (const auto& name : baseline_override)
                cfg.baseline_kinds.push_back(baselines::baseline_from_string(name));
        }

        if (ingest->parsed()) return cmd_ingest(cfg);
        if (synth->parsed()) return cmd_synth(cfg);
        if (label->parsed()) return cmd_label(cfg);
        if (backtest_cmd->parsed()) return cmd_backtest(cfg);
        if (ablate_r->parsed()) return cmd_ablate_routing(cfg);
        if (ablate_m->parsed()) return cmd_ablate_modality(cfg);
        if (train->parsed()) return cmd_train(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 3;
    }
    return 0;
}

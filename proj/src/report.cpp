#include "mixbt/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mixbt::report {

void ensure_dir(const std::string& path) {
    std::filesystem::create_directories(path);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("report: cannot open '" + path + "' for writing");
    out << content;
}

void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string format_pct(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

std::string format_num(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

Json metrics_json(const metrics::MetricReport& m) {
    Json j;
    j["total_return"] = m.total_return;
    if (m.sharpe) j["sharpe"] = *m.sharpe;
    else j["sharpe"] = nullptr;
    j["max_drawdown"] = m.max_drawdown;
    j["periods"] = m.periods;
    return j;
}

Json backtest_result_json(const backtest::BacktestResult& r) {
    Json j;
    j["asset"] = r.asset;
    j["label"] = r.label;
    j["window"] = {{"begin", r.window_begin}, {"end", r.window_end}};
    j["metrics"] = metrics_json(r.metrics);
    j["aborted"] = r.aborted;
    if (r.aborted) j["abort_reason"] = r.abort_reason;
    Json trades = Json::array();
    for (const auto& t : r.trades) {
        trades.push_back({{"date", market_data::format_iso_date(t.timestamp)},
                          {"verb", t.verb},
                          {"price", t.price},
                          {"fraction", t.fraction},
                          {"notional", t.notional},
                          {"fees", t.fees},
                          {"reason", t.reason}});
    }
    j["trades"] = trades;
    return j;
}

namespace {

void write_curve(const std::string& path, const market_data::BarSeries& series,
                 std::size_t first_bar, const std::vector<double>& equity, char sep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("report: cannot open '" + path + "' for writing");
    out << "index" << sep << "date" << sep << "equity\n";
    char buf[64];
    for (std::size_t i = 0; i < equity.size(); ++i) {
        const std::size_t bar = first_bar + i;
        const std::string date = bar < series.size()
                                     ? market_data::format_iso_date(series[bar].timestamp)
                                     : "";
        std::snprintf(buf, sizeof(buf), "%.12g", equity[i]);
        out << i << sep << date << sep << buf << '\n';
    }
}

}  // namespace

void write_equity_csv(const std::string& path, const market_data::BarSeries& series,
                      std::size_t first_bar, const std::vector<double>& equity) {
    write_curve(path, series, first_bar, equity, ',');
}

void write_equity_tsv(const std::string& path, const market_data::BarSeries& series,
                      std::size_t first_bar, const std::vector<double>& equity) {
    write_curve(path, series, first_bar, equity, '\t');
}

void write_learning_curve_csv(const std::string& path,
                              const std::vector<training::EpisodeStats>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("report: cannot open '" + path + "' for writing");
    out << "episode,mean_aggregated_return,mean_router_reward,"
           "w_trend,w_reversal,w_breakout,w_static,"
           "r_trend,r_reversal,r_breakout,r_static";
    for (std::size_t i = 0; i < strategy::kActionCount; ++i)
        out << ",n_" << strategy::to_string(strategy::action_from_index(i));
    out << '\n';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        out << ',' << buf;
    };
    for (const auto& e : curve) {
        out << e.episode;
        put(e.mean_aggregated_return);
        put(e.mean_router_reward);
        for (double w : e.mean_weights) put(w);
        for (double r : e.mean_expert_reward) put(r);
        for (std::size_t n : e.action_histogram) out << ',' << n;
        out << '\n';
    }
}

void write_routing_table(const std::string& json_path, const std::string& tsv_path,
                         const std::vector<RoutingRow>& rows, const Json& extra) {
    Json j;
    Json arr = Json::array();
    for (const auto& r : rows)
        arr.push_back({{"mode", r.mode}, {"tr", r.tr}, {"sr", r.sr}, {"mdd", r.mdd}});
    j["rows"] = arr;
    j["meta"] = extra;
    write_json_file(json_path, j);

    std::string tsv = "mode\tTR%\tSR\tMDD%\n";
    for (const auto& r : rows) {
        tsv += r.mode + "\t" + format_pct(r.tr) + "\t" + format_num(r.sr, 2) + "\t" +
               format_pct(r.mdd) + "\n";
    }
    write_text_file(tsv_path, tsv);
}

void write_labels_csv(const std::string& path,
                      const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("report: cannot open '" + path + "' for writing");
    out << "asset,window_start,label\n";
    for (const auto& [asset, start, label] : rows) out << asset << ',' << start << ',' << label << '\n';
}

}  // namespace mixbt::report

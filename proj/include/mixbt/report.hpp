#pragma once

#include <string>
#include <vector>

#include "mixbt/backtest.hpp"
#include "mixbt/config.hpp"
#include "mixbt/evaluate.hpp"
#include "mixbt/training.hpp"

namespace mixbt::report {

using config::Json;

void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);

// Percentages rendered with 2 decimals to match the tables the run reproduces.
std::string format_pct(double fraction);
std::string format_num(double v, int decimals = 4);

Json metrics_json(const metrics::MetricReport& m);
Json backtest_result_json(const backtest::BacktestResult& r);

void write_equity_csv(const std::string& path, const market_data::BarSeries& series,
                      std::size_t first_bar, const std::vector<double>& equity);

// Bar-indexed TSV for gnuplot: index, date, equity.
void write_equity_tsv(const std::string& path, const market_data::BarSeries& series,
                      std::size_t first_bar, const std::vector<double>& equity);

void write_learning_curve_csv(const std::string& path,
                              const std::vector<training::EpisodeStats>& curve);

struct RoutingRow {
    std::string mode;
    double tr = 0.0;
    double sr = 0.0;
    double mdd = 0.0;
};

// Rows in the fixed mode order; TSV columns: mode, TR%, SR, MDD%.
void write_routing_table(const std::string& json_path, const std::string& tsv_path,
                         const std::vector<RoutingRow>& rows, const Json& extra);

void write_labels_csv(const std::string& path,
                      const std::vector<std::tuple<std::string, std::string, std::string>>& rows);

}  // namespace mixbt::report

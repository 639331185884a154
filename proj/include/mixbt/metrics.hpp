#pragma once

#include <optional>
#include <span>
#include <vector>

namespace mixbt::metrics {

struct MetricReport {
    double total_return = 0.0;
    std::optional<double> sharpe;   // absent when returns have zero variance
    double max_drawdown = 0.0;
    std::size_t periods = 0;
};

// (V_T - V_0) / V_0
double total_return(std::span<const double> curve);

// mean(r - rf) / sample-std(r - rf), ddof = 1; no annualization unless
// periods_per_year is given (then multiplied by sqrt of it).
// Throws on zero variance; never returns infinity.
double sharpe(std::span<const double> returns, double risk_free = 0.0,
              std::optional<double> periods_per_year = std::nullopt);

// max over t of (running max - P_t) / running max, on positive curves.
double max_drawdown(std::span<const double> curve);

std::vector<double> simple_returns(std::span<const double> curve);

MetricReport report(std::span<const double> curve);

}  // namespace mixbt::metrics

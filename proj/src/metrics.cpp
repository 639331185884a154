#include "mixbt/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mixbt/kernels.hpp"

namespace mixbt::metrics {

double total_return(std::span<const double> curve) {
    if (curve.size() < 2) throw std::invalid_argument("total_return: need at least 2 points");
    if (curve.front() <= 0.0) throw std::invalid_argument("total_return: initial value must be positive");
    return (curve.back() - curve.front()) / curve.front();
}

double sharpe(std::span<const double> returns, double risk_free,
              std::optional<double> periods_per_year) {
    if (returns.size() < 2) throw std::invalid_argument("sharpe: need at least 2 returns");
    std::vector<double> excess(returns.begin(), returns.end());
    for (double& r : excess) r -= risk_free;
    const auto mv = kernels::mean_var(excess, 1);
    if (mv.var <= 0.0) throw std::invalid_argument("sharpe: zero variance, ratio undefined");
    double sr = mv.mean / std::sqrt(mv.var);
    if (periods_per_year) sr *= std::sqrt(*periods_per_year);
    return sr;
}

double max_drawdown(std::span<const double> curve) {
    if (curve.empty()) throw std::invalid_argument("max_drawdown: empty curve");
    return kernels::max_drawdown_scan(curve);
}

std::vector<double> simple_returns(std::span<const double> curve) {
    std::vector<double> out;
    if (curve.size() < 2) return out;
    out.reserve(curve.size() - 1);
    for (std::size_t i = 1; i < curve.size(); ++i) out.push_back(curve[i] / curve[i - 1] - 1.0);
    return out;
}

MetricReport report(std::span<const double> curve) {
    MetricReport rep;
    rep.periods = curve.size();
    rep.total_return = total_return(curve);
    rep.max_drawdown = max_drawdown(curve);
    const auto rets = simple_returns(curve);
    try {
        rep.sharpe = sharpe(rets);
    } catch (const std::invalid_argument&) {
        rep.sharpe = std::nullopt;
    }
    return rep;
}

}  // namespace mixbt::metrics

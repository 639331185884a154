#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixbt/market_data.hpp"

namespace mixbt::router {

using market_data::BarSeries;

// Simplex weights over the four experts, in family order
// (trend, reversal, breakout, static/position).
struct ExpertWeights {
    std::array<double, 4> w{};

    double trend() const { return w[0]; }
    double reversal() const { return w[1]; }
    double breakout() const { return w[2]; }
    double static_() const { return w[3]; }
    bool on_simplex(double tol = 1e-9) const;
};

enum class RouterMode { Dynamic, Uniform, BestExpert, Random };

std::string to_string(RouterMode m);
RouterMode router_mode_from_string(const std::string& s);

// Observation encoding: the last row of the standardized feature matrix (17)
// followed by scale-free renditions of the numeric summary stats (8):
//   latest return, amplitude, volume ratio - 1, volatility, ATR14 / close,
//   (RSI14 - 50) / 50, band-width ratio, MA ordering in {+1, -1, 0}.
inline constexpr std::size_t kMatrixTailDim = 17;
inline constexpr std::size_t kSummaryDim = 8;
inline constexpr std::size_t kObservationDim = kMatrixTailDim + kSummaryDim;

enum class ObservationVariant { Full, SummaryOnly, MatrixTailOnly, Zero };

std::string to_string(ObservationVariant v);

std::vector<double> build_observation(const BarSeries& series, std::size_t t,
                                      ObservationVariant variant = ObservationVariant::Full,
                                      std::size_t window = 100);

struct RouterPolicy {
    RouterMode mode = RouterMode::Dynamic;
    std::size_t obs_dim = kObservationDim;
    std::vector<double> phi;          // 4 x obs_dim, row-major (Dynamic only)
    std::array<double, 4> bias{};
    double temperature = 1.0;
    std::uint64_t seed = 42;

    static RouterPolicy make(RouterMode mode, std::size_t obs_dim = kObservationDim,
                             std::uint64_t seed = 42);
    std::array<double, 4> logits(const std::vector<double>& obs) const;
};

// Dynamic: softmax((phi * obs + bias) / temperature).
// Uniform: exactly (0.25, 0.25, 0.25, 0.25).
// BestExpert: one-hot argmax of trailing per-expert returns (ties -> lowest index).
// Random: softmax of four standard normals drawn from (seed, draw_index).
ExpertWeights route(const RouterPolicy& policy, const std::vector<double>& obs,
                    const std::optional<std::array<double, 4>>& history = std::nullopt,
                    std::uint64_t draw_index = 0);

struct RouterGrad {
    std::vector<double> phi;          // same shape as policy.phi
    std::array<double, 4> bias{};
};

// Gradient of log pi_router(choice | obs) for the categorical dominant-expert
// distribution softmax(logits / T). Dynamic mode only.
RouterGrad router_log_prob_grad(const RouterPolicy& policy, const std::vector<double>& obs,
                                std::size_t choice);

}  // namespace mixbt::router

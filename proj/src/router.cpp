#include "mixbt/router.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mixbt/indicators.hpp"
#include "mixbt/kernels.hpp"
#include "mixbt/rng.hpp"

namespace mixbt::router {

namespace {

std::array<double, 4> softmax4(std::array<double, 4> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

}  // namespace

bool ExpertWeights::on_simplex(double tol) const {
    double sum = 0.0;
    for (double v : w) {
        if (v < -tol) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

std::string to_string(RouterMode m) {
    switch (m) {
        case RouterMode::Dynamic: return "dynamic";
        case RouterMode::Uniform: return "uniform";
        case RouterMode::BestExpert: return "best-expert";
        default: return "random";
    }
}

RouterMode router_mode_from_string(const std::string& s) {
    if (s == "dynamic") return RouterMode::Dynamic;
    if (s == "uniform") return RouterMode::Uniform;
    if (s == "best-expert") return RouterMode::BestExpert;
    if (s == "random") return RouterMode::Random;
    throw std::invalid_argument("unknown router mode '" + s + "'");
}

std::string to_string(ObservationVariant v) {
    switch (v) {
        case ObservationVariant::Full: return "full";
        case ObservationVariant::SummaryOnly: return "summary-only";
        case ObservationVariant::MatrixTailOnly: return "matrix-tail-only";
        default: return "zero";
    }
}

std::vector<double> build_observation(const BarSeries& series, std::size_t t,
                                      ObservationVariant variant, std::size_t window) {
    std::vector<double> obs(kObservationDim, 0.0);
    if (variant == ObservationVariant::Zero) return obs;

    if (variant != ObservationVariant::SummaryOnly) {
        const auto fm = indicators::feature_matrix(series, t, window);
        for (std::size_t c = 0; c < kMatrixTailDim; ++c)
            obs[c] = fm.std_at(fm.rows - 1, c);
    }
    if (variant != ObservationVariant::MatrixTailOnly) {
        const auto ss = indicators::summary_stats(series, t);
        double* s = obs.data() + kMatrixTailDim;
        s[0] = ss.latest_return;
        s[1] = ss.amplitude;
        s[2] = ss.volume_ratio - 1.0;
        s[3] = ss.volatility;
        s[4] = ss.atr14 / series[t].close;
        s[5] = (ss.rsi14 - 50.0) / 50.0;
        s[6] = ss.band_width_ratio;
        s[7] = ss.ma_ordering == indicators::MaOrdering::Bullish   ? 1.0
               : ss.ma_ordering == indicators::MaOrdering::Bearish ? -1.0
                                                                   : 0.0;
    }
    return obs;
}

RouterPolicy RouterPolicy::make(RouterMode mode, std::size_t obs_dim, std::uint64_t seed) {
    RouterPolicy p;
    p.mode = mode;
    p.obs_dim = obs_dim;
    p.seed = seed;
    if (mode == RouterMode::Dynamic) p.phi.assign(4 * obs_dim, 0.0);
    return p;
}

std::array<double, 4> RouterPolicy::logits(const std::vector<double>& obs) const {
    if (obs.size() != obs_dim || phi.size() != 4 * obs_dim)
        throw std::invalid_argument("router: observation dimension mismatch");
    std::array<double, 4> z{};
    for (std::size_t i = 0; i < 4; ++i) {
        z[i] = kernels::dot(std::span<const double>(phi).subspan(i * obs_dim, obs_dim), obs) +
               bias[i];
    }
    return z;
}

ExpertWeights route(const RouterPolicy& policy, const std::vector<double>& obs,
                    const std::optional<std::array<double, 4>>& history,
                    std::uint64_t draw_index) {
    ExpertWeights out;
    switch (policy.mode) {
        case RouterMode::Dynamic: {
            auto z = policy.logits(obs);
            for (double& v : z) v /= policy.temperature;
            out.w = softmax4(z);
            return out;
        }
        case RouterMode::Uniform:
            out.w = {0.25, 0.25, 0.25, 0.25};
            return out;
        case RouterMode::BestExpert: {
            if (!history)
                throw std::invalid_argument("route: BestExpert requires trailing performance");
            std::size_t best = 0;
            for (std::size_t i = 1; i < 4; ++i)
                if ((*history)[i] > (*history)[best]) best = i;
            out.w = {0.0, 0.0, 0.0, 0.0};
            out.w[best] = 1.0;
            return out;
        }
        default: {  // Random
            rng::Stream stream(rng::mix(policy.seed, draw_index));
            std::array<double, 4> z{};
            for (double& v : z) v = stream.normal();
            out.w = softmax4(z);
            return out;
        }
    }
}

RouterGrad router_log_prob_grad(const RouterPolicy& policy, const std::vector<double>& obs,
                                std::size_t choice) {
    if (policy.mode != RouterMode::Dynamic)
        throw std::invalid_argument("router_log_prob_grad: Dynamic mode only");
    if (choice >= 4) throw std::invalid_argument("router_log_prob_grad: choice out of range");

    auto z = policy.logits(obs);
    for (double& v : z) v /= policy.temperature;
    const auto p = softmax4(z);

    RouterGrad grad;
    grad.phi.assign(policy.phi.size(), 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
        const double coeff = ((i == choice ? 1.0 : 0.0) - p[i]) / policy.temperature;
        grad.bias[i] = coeff;
        for (std::size_t d = 0; d < policy.obs_dim; ++d)
            grad.phi[i * policy.obs_dim + d] = coeff * obs[d];
    }
    return grad;
}

}  // namespace mixbt::router

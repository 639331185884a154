// Test-only oracles: independent brute-force implementations used to check
// the library. Nothing here may call into mixbt:: except for plain types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracles {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double window_mean(const std::vector<double>& x, std::size_t end_incl, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = end_incl + 1 - n; i <= end_incl; ++i) s += x[i];
    return s / static_cast<double>(n);
}

inline double window_std(const std::vector<double>& x, std::size_t end_incl, std::size_t n,
                         int ddof) {
    const double m = window_mean(x, end_incl, n);
    double s = 0.0;
    for (std::size_t i = end_incl + 1 - n; i <= end_incl; ++i) s += (x[i] - m) * (x[i] - m);
    return std::sqrt(s / static_cast<double>(n - static_cast<std::size_t>(ddof)));
}

inline std::vector<double> sma(const std::vector<double>& x, std::size_t n) {
    std::vector<double> out(x.size(), kNaN);
    for (std::size_t t = n - 1; t < x.size(); ++t) out[t] = window_mean(x, t, n);
    return out;
}

inline std::vector<double> ema(const std::vector<double>& x, std::size_t n) {
    std::vector<double> out(x.size(), kNaN);
    if (x.size() < n) return out;
    double seed = 0.0;
    for (std::size_t i = 0; i < n; ++i) seed += x[i];
    seed /= static_cast<double>(n);
    out[n - 1] = seed;
    const double a = 2.0 / (static_cast<double>(n) + 1.0);
    for (std::size_t t = n; t < x.size(); ++t) out[t] = a * x[t] + (1.0 - a) * out[t - 1];
    return out;
}

inline std::vector<double> rsi_wilder(const std::vector<double>& closes, std::size_t n) {
    std::vector<double> out(closes.size(), kNaN);
    if (closes.size() < n + 1) return out;
    double gain = 0.0, loss = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        const double d = closes[t] - closes[t - 1];
        if (d > 0.0) gain += d;
        else loss -= d;
    }
    gain /= static_cast<double>(n);
    loss /= static_cast<double>(n);
    auto to_rsi = [](double g, double l) {
        if (l == 0.0 && g == 0.0) return 50.0;
        if (l == 0.0) return 100.0;
        return 100.0 - 100.0 / (1.0 + g / l);
    };
    out[n] = to_rsi(gain, loss);
    for (std::size_t t = n + 1; t < closes.size(); ++t) {
        const double d = closes[t] - closes[t - 1];
        gain = (gain * static_cast<double>(n - 1) + std::max(d, 0.0)) / static_cast<double>(n);
        loss = (loss * static_cast<double>(n - 1) + std::max(-d, 0.0)) / static_cast<double>(n);
        out[t] = to_rsi(gain, loss);
    }
    return out;
}

struct OhlcRow {
    double open, high, low, close, volume;
};

inline std::vector<double> true_ranges(const std::vector<OhlcRow>& bars) {
    std::vector<double> tr(bars.size(), kNaN);
    for (std::size_t t = 1; t < bars.size(); ++t)
        tr[t] = std::max(bars[t].high, bars[t - 1].close) - std::min(bars[t].low, bars[t - 1].close);
    return tr;
}

inline std::vector<double> atr_mean(const std::vector<OhlcRow>& bars, std::size_t n) {
    const auto tr = true_ranges(bars);
    std::vector<double> out(bars.size(), kNaN);
    for (std::size_t t = n; t < bars.size(); ++t) {
        double s = 0.0;
        for (std::size_t i = t + 1 - n; i <= t; ++i) s += tr[i];
        out[t] = s / static_cast<double>(n);
    }
    return out;
}

struct KdjRows {
    std::vector<double> k, d, j;
};

inline KdjRows kdj(const std::vector<OhlcRow>& bars, std::size_t n) {
    KdjRows out;
    out.k.assign(bars.size(), kNaN);
    out.d.assign(bars.size(), kNaN);
    out.j.assign(bars.size(), kNaN);
    double kp = 50.0, dp = 50.0;
    for (std::size_t t = n - 1; t < bars.size(); ++t) {
        double hh = -1e300, ll = 1e300;
        for (std::size_t i = t + 1 - n; i <= t; ++i) {
            hh = std::max(hh, bars[i].high);
            ll = std::min(ll, bars[i].low);
        }
        const double rsv = hh == ll ? 50.0 : 100.0 * (bars[t].close - ll) / (hh - ll);
        kp = (2.0 * kp + rsv) / 3.0;
        dp = (2.0 * dp + kp) / 3.0;
        out.k[t] = kp;
        out.d[t] = dp;
        out.j[t] = 3.0 * kp - 2.0 * dp;
    }
    return out;
}

struct AdxRows {
    std::vector<double> adx, plus_di, minus_di;
};

inline AdxRows adx_wilder(const std::vector<OhlcRow>& bars, std::size_t n) {
    const std::size_t len = bars.size();
    AdxRows out;
    out.adx.assign(len, kNaN);
    out.plus_di.assign(len, kNaN);
    out.minus_di.assign(len, kNaN);
    std::vector<double> pdm(len, 0.0), mdm(len, 0.0), tr(len, 0.0), dx(len, kNaN);
    for (std::size_t t = 1; t < len; ++t) {
        const double up = bars[t].high - bars[t - 1].high;
        const double dn = bars[t - 1].low - bars[t].low;
        pdm[t] = (up > dn && up > 0.0) ? up : 0.0;
        mdm[t] = (dn > up && dn > 0.0) ? dn : 0.0;
        tr[t] = std::max(bars[t].high, bars[t - 1].close) - std::min(bars[t].low, bars[t - 1].close);
    }
    double sp = 0.0, sm = 0.0, st = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        sp += pdm[t];
        sm += mdm[t];
        st += tr[t];
    }
    for (std::size_t t = n; t < len; ++t) {
        if (t > n) {
            sp = sp - sp / static_cast<double>(n) + pdm[t];
            sm = sm - sm / static_cast<double>(n) + mdm[t];
            st = st - st / static_cast<double>(n) + tr[t];
        }
        const double p = st == 0.0 ? 0.0 : 100.0 * sp / st;
        const double m = st == 0.0 ? 0.0 : 100.0 * sm / st;
        out.plus_di[t] = p;
        out.minus_di[t] = m;
        dx[t] = (p + m) == 0.0 ? 0.0 : 100.0 * std::abs(p - m) / (p + m);
    }
    if (len > 2 * n) {
        double a = 0.0;
        for (std::size_t t = n; t < 2 * n; ++t) a += dx[t];
        a /= static_cast<double>(n);
        for (std::size_t t = 2 * n; t < len; ++t) {
            a = (a * static_cast<double>(n - 1) + dx[t]) / static_cast<double>(n);
            out.adx[t] = a;
        }
    }
    return out;
}

// O(n^2) drawdown: max over pairs s <= t of (P_s - P_t) / P_s with P_s the peak.
inline double mdd_quadratic(const std::vector<double>& curve) {
    double worst = 0.0;
    for (std::size_t t = 0; t < curve.size(); ++t) {
        for (std::size_t s = 0; s <= t; ++s) {
            const double dd = (curve[s] - curve[t]) / curve[s];
            worst = std::max(worst, dd);
        }
    }
    return worst;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Central finite differences of a scalar function over a parameter vector.
inline std::vector<double> finite_diff(std::function<double(const std::vector<double>&)> f,
                                       std::vector<double> theta, double h = 1e-6) {
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i];
        theta[i] = keep + h;
        const double fp = f(theta);
        theta[i] = keep - h;
        const double fm = f(theta);
        theta[i] = keep;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace oracles

#include "mixbt/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixbt::kernels {

namespace scalar {

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double sum_sq_dev(std::span<const double> x, double mean) {
    double acc = 0.0;
    for (double v : x) {
        const double d = v - mean;
        acc += d * d;
    }
    return acc;
}

void scale_shift(std::span<const double> in, double shift, double scale, std::span<double> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = (in[i] + shift) * scale;
}

}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double sum_sq_dev(std::span<const double> x, double mean);
void scale_shift(std::span<const double> in, double shift, double scale, std::span<double> out);
}  // namespace avx2
#endif

namespace {

struct Dispatch {
    double (*sum)(std::span<const double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    double (*sum_sq_dev)(std::span<const double>, double);
    void (*scale_shift)(std::span<const double>, double, double, std::span<double>);
};

constexpr Dispatch kScalar{scalar::sum, scalar::dot, scalar::sum_sq_dev, scalar::scale_shift};
#if defined(__x86_64__)
constexpr Dispatch kAvx2{avx2::sum, avx2::dot, avx2::sum_sq_dev, avx2::scale_shift};
#endif

Backend detect_backend() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
    return Backend::Scalar;
}

Backend g_backend = detect_backend();

const Dispatch& table() {
#if defined(__x86_64__)
    if (g_backend == Backend::Avx2) return kAvx2;
#endif
    return kScalar;
}

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_supported(Backend b) {
    if (b == Backend::Scalar) return true;
#if defined(__x86_64__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

void set_backend(Backend b) {
    if (!backend_supported(b)) throw std::invalid_argument("kernels: backend not supported on this CPU");
    g_backend = b;
}

std::string backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

double sum(std::span<const double> x) { return table().sum(x); }

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kernels::dot: size mismatch");
    return table().dot(x, y);
}

MeanVar mean_var(std::span<const double> x, int ddof) {
    const std::size_t n = x.size();
    if (n == 0 || n <= static_cast<std::size_t>(ddof))
        throw std::invalid_argument("kernels::mean_var: too few elements");
    MeanVar mv;
    mv.mean = table().sum(x) / static_cast<double>(n);
    mv.var = table().sum_sq_dev(x, mv.mean) / static_cast<double>(n - static_cast<std::size_t>(ddof));
    return mv;
}

void rolling_mean(std::span<const double> in, std::size_t window, std::span<double> out) {
    if (window == 0) throw std::invalid_argument("kernels::rolling_mean: window must be >= 1");
    if (out.size() != in.size()) throw std::invalid_argument("kernels::rolling_mean: output size mismatch");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto& d = table();
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i + 1 < window) {
            out[i] = nan;
        } else {
            out[i] = d.sum(in.subspan(i + 1 - window, window)) / static_cast<double>(window);
        }
    }
}

void rolling_std(std::span<const double> in, std::size_t window, int ddof, std::span<double> out) {
    if (window <= static_cast<std::size_t>(ddof))
        throw std::invalid_argument("kernels::rolling_std: window too small for ddof");
    if (out.size() != in.size()) throw std::invalid_argument("kernels::rolling_std: output size mismatch");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto& d = table();
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i + 1 < window) {
            out[i] = nan;
        } else {
            auto w = in.subspan(i + 1 - window, window);
            const double mean = d.sum(w) / static_cast<double>(window);
            out[i] = std::sqrt(d.sum_sq_dev(w, mean) / static_cast<double>(window - static_cast<std::size_t>(ddof)));
        }
    }
}

void scale_shift(std::span<const double> in, double shift, double scale, std::span<double> out) {
    if (out.size() != in.size()) throw std::invalid_argument("kernels::scale_shift: output size mismatch");
    table().scale_shift(in, shift, scale, out);
}

double max_drawdown_scan(std::span<const double> curve) {
    if (curve.empty()) throw std::invalid_argument("kernels::max_drawdown_scan: empty curve");
    double peak = curve[0];
    double worst = 0.0;
    for (double v : curve) {
        if (v <= 0.0) throw std::invalid_argument("kernels::max_drawdown_scan: non-positive value");
        if (v > peak) peak = v;
        const double dd = (peak - v) / peak;
        if (dd > worst) worst = dd;
    }
    return worst;
}

}  // namespace mixbt::kernels

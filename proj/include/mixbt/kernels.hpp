#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace mixbt::kernels {

// Numeric inner loops used by indicators, metrics and the policy heads.
// Every kernel has a scalar reference implementation; on x86-64 an AVX2
// variant is selected at runtime when the CPU supports it. The two paths
// are equivalence-tested (they may differ in the last ulps because SIMD
// reorders additions).

enum class Backend { Scalar, Avx2 };

Backend active_backend();
void set_backend(Backend b);   // throws std::invalid_argument if unsupported on this CPU
bool backend_supported(Backend b);
std::string backend_name(Backend b);

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

// ddof 0 = population variance, 1 = sample variance.
MeanVar mean_var(std::span<const double> x, int ddof);

// out[i] = mean(in[i-window+1 .. i]) for i >= window-1, NaN before.
// Each window is summed independently; no running-sum drift.
void rolling_mean(std::span<const double> in, std::size_t window, std::span<double> out);

// Population (ddof=0) or sample (ddof=1) std over each window; NaN before warm-up.
void rolling_std(std::span<const double> in, std::size_t window, int ddof, std::span<double> out);

// out = (in + shift) * scale, elementwise. Standardization uses shift=-mean, scale=1/std.
void scale_shift(std::span<const double> in, double shift, double scale, std::span<double> out);

// max over t of (running_max - x[t]) / running_max. Prefix-dependent: scalar only.
double max_drawdown_scan(std::span<const double> curve);

}  // namespace mixbt::kernels

// AVX2 kernel variants. This translation unit is compiled with -mavx2 and its
// functions are only reached after the runtime CPU check in kernels.cpp.

#if defined(__x86_64__)

#include <immintrin.h>

#include <cstddef>
#include <span>

namespace mixbt::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    const double* p = x.data();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
    double tail = 0.0;
    for (; i < n; ++i) tail += p[i];
    return hsum(acc) + tail;
}

double dot(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double* px = x.data();
    const double* py = y.data();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc);
    double tail = 0.0;
    for (; i < n; ++i) tail += px[i] * py[i];
    return hsum(acc) + tail;
}

double sum_sq_dev(std::span<const double> x, double mean) {
    const std::size_t n = x.size();
    const double* p = x.data();
    const __m256d m = _mm256_set1_pd(mean);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), m);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        const double d = p[i] - mean;
        tail += d * d;
    }
    return hsum(acc) + tail;
}

void scale_shift(std::span<const double> in, double shift, double scale, std::span<double> out) {
    const std::size_t n = in.size();
    const double* p = in.data();
    double* q = out.data();
    const __m256d sh = _mm256_set1_pd(shift);
    const __m256d sc = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(q + i, _mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(p + i), sh), sc));
    for (; i < n; ++i) q[i] = (p[i] + shift) * scale;
}

}  // namespace mixbt::kernels::avx2

#endif  // __x86_64__

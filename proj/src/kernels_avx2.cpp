// AVX2 variants of the dense kernels. Compiled with -mavx2 in this TU only;
// callers must check avx2() != nullptr before use (runtime CPU dispatch).

#include "pruitt/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace pruitt::kernels {
namespace {

inline __m256d abs_pd(__m256d v) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, v);
}

// Fixed-order horizontal sum: (x0+x2) + (x1+x3).
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// Same multiply sequence as the scalar pow-by-squaring, lane-parallel.
inline __m256d pow_vec(__m256d base, std::uint64_t e) {
    __m256d result = _mm256_set1_pd(1.0);
    while (e != 0) {
        if (e & 1u) result = _mm256_mul_pd(result, base);
        base = _mm256_mul_pd(base, base);
        e >>= 1u;
    }
    return result;
}

inline double pow_abs_scalar(double x, double p) {
    double a = std::fabs(x);
    double ip;
    if (std::modf(p, &ip) == 0.0 && p <= 64.0) {
        auto e = static_cast<std::uint64_t>(ip);
        double result = 1.0;
        double base = a;
        while (e != 0) {
            if (e & 1u) result *= base;
            base *= base;
            e >>= 1u;
        }
        return result;
    }
    return std::pow(a, p);
}

double sum_sq_(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d a = _mm256_loadu_pd(x + i);
        __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(b, b));
    }
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double sum_sq_scaled_(const double* x, std::size_t n, double s) {
    const __m256d vs = _mm256_set1_pd(s);
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) {
        const double v = s * x[i];
        acc += v * v;
    }
    return acc;
}

double sum_abs_pow_(const double* x, std::size_t n, double p) {
    if (p == 2.0) return sum_sq_(x, n);
    double ip;
    if (std::modf(p, &ip) != 0.0 || p > 64.0) return scalar().sum_abs_pow(x, n, p);
    const auto e = static_cast<std::uint64_t>(ip);
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = abs_pd(_mm256_loadu_pd(x + i));
        acc0 = _mm256_add_pd(acc0, pow_vec(a, e));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += pow_abs_scalar(x[i], p);
    return acc;
}

double sum_abs_pow_scaled_(const double* x, std::size_t n, double s, double p) {
    if (p == 2.0) return sum_sq_scaled_(x, n, s);
    double ip;
    if (std::modf(p, &ip) != 0.0 || p > 64.0) return scalar().sum_abs_pow_scaled(x, n, s, p);
    const auto e = static_cast<std::uint64_t>(ip);
    const __m256d vs = _mm256_set1_pd(s);
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = abs_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
        acc0 = _mm256_add_pd(acc0, pow_vec(a, e));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += pow_abs_scalar(s * x[i], p);
    return acc;
}

double max_abs_(const double* x, std::size_t n) {
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vm = _mm256_max_pd(vm, abs_pd(_mm256_loadu_pd(x + i)));
    }
    __m128d lo = _mm256_castpd256_pd128(vm);
    __m128d hi = _mm256_extractf128_pd(vm, 1);
    __m128d m2 = _mm_max_pd(lo, hi);
    double m = _mm_cvtsd_f64(_mm_max_sd(m2, _mm_unpackhi_pd(m2, m2)));
    for (; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

void add_assign_(double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(x + i);
        __m256d b = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_add_pd(a, b));
    }
    for (; i < n; ++i) x[i] += y[i];
}

void accumulate_scaled_(double* x, const double* y, std::size_t n, double s) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(x + i);
        __m256d b = _mm256_mul_pd(vs, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(x + i, _mm256_add_pd(a, b));
    }
    for (; i < n; ++i) x[i] += s * y[i];
}

}  // namespace

bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }

const Backend* avx2() {
    if (!avx2_supported()) return nullptr;
    static const Backend backend{
        "avx2",
        &sum_sq_,
        &sum_sq_scaled_,
        &sum_abs_pow_,
        &sum_abs_pow_scaled_,
        &max_abs_,
        &add_assign_,
        &accumulate_scaled_,
    };
    return &backend;
}

}  // namespace pruitt::kernels

#else

namespace pruitt::kernels {
bool avx2_supported() { return false; }
const Backend* avx2() { return nullptr; }
}  // namespace pruitt::kernels

#endif

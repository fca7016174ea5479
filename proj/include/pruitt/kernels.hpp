#pragma once

#include <cstddef>
#include <string_view>

namespace pruitt::kernels {

// Dense double-precision primitives used by the norm and accumulator paths.
// A scalar reference implementation always exists; an AVX2 variant is
// selected at startup when the CPU supports it. The two are equivalence
// tested against each other: elementwise ops (add_assign, accumulate_scaled,
// max_abs) must match bit for bit, reductions may differ by reassociation
// only.
//
// The environment variable PRUITT_KERNELS=scalar|avx2 forces a backend.
struct Backend {
    const char* name;
    // sum_j x_j^2
    double (*sum_sq)(const double* x, std::size_t n);
    // sum_j (scale * x_j)^2
    double (*sum_sq_scaled)(const double* x, std::size_t n, double scale);
    // sum_j |x_j|^p, p >= 1 (p == 2 routes to sum_sq)
    double (*sum_abs_pow)(const double* x, std::size_t n, double p);
    // sum_j |scale * x_j|^p
    double (*sum_abs_pow_scaled)(const double* x, std::size_t n, double scale, double p);
    // max_j |x_j| (0 for n == 0)
    double (*max_abs)(const double* x, std::size_t n);
    // x_j += y_j
    void (*add_assign)(double* x, const double* y, std::size_t n);
    // x_j += scale * y_j
    void (*accumulate_scaled)(double* x, const double* y, std::size_t n, double scale);
};

const Backend& scalar();
const Backend* avx2();   // nullptr when not compiled in or not supported
bool avx2_supported();

// Runtime-selected backend. Selection happens once; force_backend overrides
// it (tests only -- not safe while workers are running).
const Backend& active();
void force_backend(std::string_view name);

inline double sum_sq(const double* x, std::size_t n) { return active().sum_sq(x, n); }
inline double sum_sq_scaled(const double* x, std::size_t n, double s) { return active().sum_sq_scaled(x, n, s); }
inline double sum_abs_pow(const double* x, std::size_t n, double p) { return active().sum_abs_pow(x, n, p); }
inline double sum_abs_pow_scaled(const double* x, std::size_t n, double s, double p) { return active().sum_abs_pow_scaled(x, n, s, p); }
inline double max_abs(const double* x, std::size_t n) { return active().max_abs(x, n); }
inline void add_assign(double* x, const double* y, std::size_t n) { active().add_assign(x, y, n); }
inline void accumulate_scaled(double* x, const double* y, std::size_t n, double s) { active().accumulate_scaled(x, y, n, s); }

}  // namespace pruitt::kernels

#include "pruitt/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace pruitt::kernels {
namespace {

// |x|^p for integer p via squaring; callers guarantee p >= 1.
inline double pow_abs(double x, double p) {
    double a = std::fabs(x);
    if (p == 2.0) return a * a;
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
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double sum_sq_scaled_(const double* x, std::size_t n, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = s * x[i];
        acc += v * v;
    }
    return acc;
}

double sum_abs_pow_(const double* x, std::size_t n, double p) {
    if (p == 2.0) return sum_sq_(x, n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += pow_abs(x[i], p);
    return acc;
}

double sum_abs_pow_scaled_(const double* x, std::size_t n, double s, double p) {
    if (p == 2.0) return sum_sq_scaled_(x, n, s);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += pow_abs(s * x[i], p);
    return acc;
}

double max_abs_(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

void add_assign_(double* x, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] += y[i];
}

void accumulate_scaled_(double* x, const double* y, std::size_t n, double s) {
    for (std::size_t i = 0; i < n; ++i) x[i] += s * y[i];
}

}  // namespace

const Backend& scalar() {
    static const Backend backend{
        "scalar",
        &sum_sq_,
        &sum_sq_scaled_,
        &sum_abs_pow_,
        &sum_abs_pow_scaled_,
        &max_abs_,
        &add_assign_,
        &accumulate_scaled_,
    };
    return backend;
}

}  // namespace pruitt::kernels

#pragma once

// Test-only oracles. Everything here is independent of the library's
// computational paths: closed forms, dense linear solves, and compensated
// arithmetic used to freeze expected values.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

// Exit of the simple +/-1 walk from 0: |S| > r first happens at |S| = m with
// m = floor(r) + 1, and E T = m^2.
inline double gambler_ruin_mean(double r) {
    const double m = std::floor(r) + 1.0;
    return m * m;
}

struct GamblerRuinSolve {
    double mean = 0.0;
    double variance = 0.0;
};

// Dense Markov-chain solve over interior states s = -(m-1)..(m-1):
//   u(s) = 1 + (u(s-1) + u(s+1)) / 2,        u(+-m) = 0
//   w(s) = 2 u(s) - 1 + (w(s-1) + w(s+1)) / 2, w(+-m) = 0   (second moment)
// solved with the Thomas algorithm.
inline GamblerRuinSolve gambler_ruin_solve(int m) {
    if (m < 1) throw std::invalid_argument("gambler_ruin_solve: m >= 1");
    const int n = 2 * m - 1;
    const auto solve_tridiag = [n](std::vector<double> d) {
        std::vector<double> b(static_cast<std::size_t>(n), 1.0);
        for (int i = 1; i < n; ++i) {
            const double w = -0.5 / b[static_cast<std::size_t>(i - 1)];
            b[static_cast<std::size_t>(i)] -= w * -0.5;
            d[static_cast<std::size_t>(i)] -= w * d[static_cast<std::size_t>(i - 1)];
        }
        std::vector<double> x(static_cast<std::size_t>(n));
        x[static_cast<std::size_t>(n - 1)] =
            d[static_cast<std::size_t>(n - 1)] / b[static_cast<std::size_t>(n - 1)];
        for (int i = n - 2; i >= 0; --i) {
            x[static_cast<std::size_t>(i)] =
                (d[static_cast<std::size_t>(i)] + 0.5 * x[static_cast<std::size_t>(i + 1)]) /
                b[static_cast<std::size_t>(i)];
        }
        return x;
    };
    const auto u = solve_tridiag(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    std::vector<double> rhs2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rhs2[static_cast<std::size_t>(i)] = 2.0 * u[static_cast<std::size_t>(i)] - 1.0;
    }
    const auto w = solve_tridiag(std::move(rhs2));
    const auto mid = static_cast<std::size_t>(m - 1);
    return {u[mid], w[mid] - u[mid] * u[mid]};
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P(|X| > r) for X ~ N(0, sigma^2).
inline double gaussian_tail_prob(double r, double sigma) {
    return std::erfc(r / (sigma * std::numbers::sqrt2));
}

// E(X^2 ; |X| <= r) for X ~ N(0, sigma^2).
inline double gaussian_truncated_sq(double r, double sigma) {
    const double z = r / sigma;
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return sigma * sigma * ((2.0 * std_normal_cdf(z) - 1.0) - 2.0 * z * pdf);
}

// Compensated (Neumaier) Euclidean norm with max rescaling.
inline double euclidean_norm_compensated(std::span<const double> x) {
    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) return 0.0;
    double sum = 0.0;
    double comp = 0.0;
    for (double v : x) {
        const double s = v / mx;
        const double sq = s * s;
        const double t = sum + sq;
        if (sum >= sq) {
            comp += (sum - t) + sq;
        } else {
            comp += (sq - t) + sum;
        }
        sum = t;
    }
    return mx * std::sqrt(sum + comp);
}

// Brute-force central moments.
struct BruteMoments {
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};
inline BruteMoments brute_moments(std::span<const double> xs) {
    BruteMoments out;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) out.mean += x;
    out.mean /= n;
    for (double x : xs) {
        const double d = x - out.mean;
        out.m2 += d * d;
        out.m3 += d * d * d;
        out.m4 += d * d * d * d;
    }
    return out;
}

}  // namespace oracle

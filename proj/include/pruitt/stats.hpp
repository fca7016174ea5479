#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pruitt {

// Streaming central moments up to order four, mergeable (Chan/Pebay update).
// Merging in a fixed order keeps reductions deterministic regardless of how
// many workers produced the pieces.
struct MomentAcc {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x);
    void merge(const MomentAcc& other);

    double variance() const;          // unbiased (n-1)
    double variance_population() const;
    double fourth_central() const;    // m4 / n
    double sem() const;               // sqrt(variance / n)
    // Standard error of the sample variance, sqrt((m4/n - var^2) / n).
    double variance_se() const;
};

// Deterministic pairwise merge of per-block accumulators (index order).
MomentAcc merge_pairwise(std::span<const MomentAcc> blocks);

// Per-coordinate mean and second moment for vector-valued samples.
struct VectorMomentAcc {
    std::uint64_t n = 0;
    std::vector<double> mean;
    std::vector<double> m2;  // sum of squared deviations, per coordinate

    explicit VectorMomentAcc(std::size_t dim = 0) : mean(dim, 0.0), m2(dim, 0.0) {}
    void add(std::span<const double> x);
    void merge(const VectorMomentAcc& other);
    double coord_variance(std::size_t j) const;
};

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares line fit; slope_se from residual variance
// (0 when the fit is exact or n == 2).
SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

// Adaptive Simpson quadrature on [a, b] to the given absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 40);

// Standard normal CDF via erfc.
double normal_cdf(double x);

// E|g|^p for standard normal g, computed from the Gamma closed form
// 2^{p/2} Gamma((p+1)/2) / sqrt(pi) and cross-checked against adaptive
// quadrature to relative 1e-10 on every call. Throws if the two disagree.
double gaussian_abs_moment(double p);

// Neumaier compensated summation (test oracle quality).
double compensated_sum(std::span<const double> xs);

// Geometric grid of `points` values spanning [lo, hi] inclusive.
std::vector<double> geometric_grid(double lo, double hi, int points);

// Geometric grid from lo with the given ratio (used when only a lower bound
// is configured; default ratio 2^(1/4)).
std::vector<double> geometric_grid_ratio(double lo, double ratio, int points);

}  // namespace pruitt

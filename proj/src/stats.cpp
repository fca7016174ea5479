#include "pruitt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pruitt {

void MomentAcc::add(double x) {
    // Pebay's incremental update for central moments.
    const double n1 = static_cast<double>(n);
    ++n;
    const double nn = static_cast<double>(n);
    const double delta = x - mean;
    const double delta_n = delta / nn;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean += delta_n;
    m4 += term1 * delta_n2 * (nn * nn - 3.0 * nn + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
    m3 += term1 * delta_n * (nn - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
}

void MomentAcc::merge(const MomentAcc& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double nc = na + nb;
    const double delta = other.mean - mean;
    const double delta2 = delta * delta;
    const double delta3 = delta2 * delta;
    const double delta4 = delta2 * delta2;

    const double new_mean = mean + delta * nb / nc;
    const double new_m2 = m2 + other.m2 + delta2 * na * nb / nc;
    const double new_m3 = m3 + other.m3 + delta3 * na * nb * (na - nb) / (nc * nc) +
                          3.0 * delta * (na * other.m2 - nb * m2) / nc;
    const double new_m4 = m4 + other.m4 +
                          delta4 * na * nb * (na * na - na * nb + nb * nb) / (nc * nc * nc) +
                          6.0 * delta2 * (na * na * other.m2 + nb * nb * m2) / (nc * nc) +
                          4.0 * delta * (na * other.m3 - nb * m3) / nc;

    n += other.n;
    mean = new_mean;
    m2 = new_m2;
    m3 = new_m3;
    m4 = new_m4;
}

double MomentAcc::variance() const {
    if (n < 2) return 0.0;
    return m2 / static_cast<double>(n - 1);
}

double MomentAcc::variance_population() const {
    if (n == 0) return 0.0;
    return m2 / static_cast<double>(n);
}

double MomentAcc::fourth_central() const {
    if (n == 0) return 0.0;
    return m4 / static_cast<double>(n);
}

double MomentAcc::sem() const {
    if (n == 0) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n));
}

double MomentAcc::variance_se() const {
    if (n < 2) return 0.0;
    const double var = variance_population();
    const double spread = fourth_central() - var * var;
    return std::sqrt(std::max(0.0, spread) / static_cast<double>(n));
}

MomentAcc merge_pairwise(std::span<const MomentAcc> blocks) {
    if (blocks.empty()) return {};
    std::vector<MomentAcc> level(blocks.begin(), blocks.end());
    while (level.size() > 1) {
        std::vector<MomentAcc> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            MomentAcc merged = level[i];
            merged.merge(level[i + 1]);
            next.push_back(merged);
        }
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
    }
    return level.front();
}

void VectorMomentAcc::add(std::span<const double> x) {
    if (mean.size() != x.size()) throw std::invalid_argument("VectorMomentAcc: dimension mismatch");
    ++n;
    const double nn = static_cast<double>(n);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double delta = x[j] - mean[j];
        mean[j] += delta / nn;
        m2[j] += delta * (x[j] - mean[j]);
    }
}

void VectorMomentAcc::merge(const VectorMomentAcc& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    if (mean.size() != other.mean.size()) {
        throw std::invalid_argument("VectorMomentAcc: dimension mismatch");
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double nc = na + nb;
    for (std::size_t j = 0; j < mean.size(); ++j) {
        const double delta = other.mean[j] - mean[j];
        mean[j] += delta * nb / nc;
        m2[j] += other.m2[j] + delta * delta * na * nb / nc;
    }
    n += other.n;
}

double VectorMomentAcc::coord_variance(std::size_t j) const {
    if (n < 2) return 0.0;
    return m2[j] / static_cast<double>(n - 1);
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_line: need at least two matched points");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    SlopeFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double resid = y[i] - (fit.intercept + fit.slope * x[i]);
            rss += resid * resid;
        }
        fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

namespace {

double simpson_rule(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, a, m);
    const double right = simpson_rule(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson_rule(fa, fm, fb, a, b);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_abs_moment(double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("gaussian_abs_moment: p must be finite and nonnegative");
    }
    const double closed_form =
        std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0))) /
        std::sqrt(std::numbers::pi);
    // Quadrature cross-check: E|g|^p = sqrt(2/pi) * int_0^inf x^p exp(-x^2/2) dx.
    // Width-2 panels keep the adaptive rule from stepping over the bump; the
    // integrand is negligible beyond x = 48 for p <= 64.
    const auto integrand = [p](double x) { return std::pow(x, p) * std::exp(-0.5 * x * x); };
    double raw = 0.0;
    for (double a = 0.0; a < 48.0; a += 2.0) {
        raw += adaptive_simpson(integrand, a, a + 2.0, 1e-14 * closed_form);
    }
    const double quad = std::sqrt(2.0 / std::numbers::pi) * raw;
    if (std::fabs(quad - closed_form) > 1e-10 * closed_form) {
        throw std::logic_error("gaussian_abs_moment: closed form and quadrature disagree");
    }
    return closed_form;
}

double compensated_sum(std::span<const double> xs) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || points < 1) {
        throw std::invalid_argument("geometric_grid: need 0 < lo <= hi and points >= 1");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    const double ratio = std::pow(hi / lo, 1.0 / (points - 1));
    double value = lo;
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = value;
        value *= ratio;
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> geometric_grid_ratio(double lo, double ratio, int points) {
    if (!(lo > 0.0) || !(ratio > 1.0) || points < 1) {
        throw std::invalid_argument("geometric_grid_ratio: need lo > 0, ratio > 1, points >= 1");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    double value = lo;
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = value;
        value *= ratio;
    }
    return grid;
}

}  // namespace pruitt

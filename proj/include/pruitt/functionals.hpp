#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pruitt/distributions.hpp"
#include "pruitt/streams.hpp"

namespace pruitt {

enum class FunctionalsSource { Analytic, MonteCarlo };

// The tuple (G, K, M, h) at radius r:
//   G(r) = P(||X|| > r)                      (strict inequality)
//   K(r) = r^-2 E(||X||^2 ; ||X|| <= r)      (ties at ||X|| = r belong here)
//   M(r) = r^-1 E(X ; ||X|| <= r)
//   h(r) = G + K + ||M||                     (by construction)
struct PruittFunctionals {
    double r = 0.0;
    double G = 0.0;
    double K = 0.0;
    Vector M;
    double M_norm = 0.0;
    double h = 0.0;
    FunctionalsSource source = FunctionalsSource::Analytic;
    std::uint64_t samples = 0;
    // 95% CI half-widths; 0 for analytic values and degenerate (zero-variance)
    // estimators, which are exact.
    double ci_G = 0.0;
    double ci_K = 0.0;
    double ci_M = 0.0;
    double ci_h = 0.0;
};

// Exact functionals from the discrete norm law (plus the atom law when the
// distribution is not symmetric). Throws when no closed form exists.
PruittFunctionals functionals_analytic(const StepDistribution& dist, double r);

// Plug-in estimators on n samples; G, K and M share the same draws so the h
// interval comes from the summed per-sample statistic.
PruittFunctionals functionals_mc(const StepDistribution& dist, double r, std::uint64_t n,
                                 std::uint64_t seed,
                                 std::uint64_t stream_base = stream_salt::kFunctionals);

// Analytic when available, MC otherwise.
PruittFunctionals functionals_auto(const StepDistribution& dist, double r, std::uint64_t mc_samples,
                                   std::uint64_t seed,
                                   std::uint64_t stream_base = stream_salt::kFunctionals);

bool has_analytic_functionals(const StepDistribution& dist);

// G(r) + K(r) = r^-2 int_0^r 2u G(u) du, evaluated exactly over the jump
// points of the discrete law (analytic path) or by adaptive Simpson on the
// empirical tail (MC path).
struct Q2Report {
    double r = 0.0;
    double direct = 0.0;         // G(r) + K(r)
    double integral_form = 0.0;  // r^-2 int_0^r 2u G(u) du
    double residual = 0.0;
    bool analytic = true;
    double tol = 0.0;  // stated quadrature tolerance (MC path)
};
Q2Report check_q2_identity(const StepDistribution& dist, double r);
Q2Report check_q2_identity_mc(const StepDistribution& dist, double r, std::uint64_t n,
                              std::uint64_t seed, double tol = 1e-3);

// r^2 / (2 s^2) <= h(s) / h(r) <= 2 for r <= s; failure requires the margin
// to survive CI inflation.
struct HdCheck {
    double r = 0.0;
    double s = 0.0;
    double ratio = 0.0;
    double lower = 0.0;
    double upper = 2.0;
    double margin_lower = 0.0;  // ratio - lower
    double margin_upper = 0.0;  // upper - ratio
    bool pass = true;
};
HdCheck check_hd_bounds(const PruittFunctionals& f_r, const PruittFunctionals& f_s);

// r^2 h(r) / E||X||^2 along a grid; the limit is 1 for mean-zero X with
// finite second moment. Only the terminal closeness is asserted by callers.
struct HLimitReport {
    struct Row {
        double r = 0.0;
        double ratio = 0.0;
    };
    std::vector<Row> rows;
    double sq_norm = 0.0;
    double terminal_gap = 0.0;
    bool monotone_approach = true;  // |ratio - 1| nonincreasing along the grid
};
HLimitReport check_h_limit(const StepDistribution& dist, std::span<const double> r_grid,
                           std::uint64_t mc_samples, std::uint64_t seed);

// E||X-hat||^2 = 9 r^2 (G(3r) + K(3r)): MC on the truncated step against the
// functionals at 3r (analytic when available, independent streams otherwise).
struct QxReport {
    double r = 0.0;
    double mc_estimate = 0.0;
    double mc_se = 0.0;
    double reference = 0.0;
    double reference_se = 0.0;
    double residual = 0.0;
    double combined_se = 0.0;
    bool within_ci = true;
};
QxReport truncated_moment_identity(const StepDistribution& dist, double r, std::uint64_t n,
                                   std::uint64_t seed);

}  // namespace pruitt

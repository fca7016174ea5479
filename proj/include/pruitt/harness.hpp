#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pruitt/functionals.hpp"
#include "pruitt/simulator.hpp"
#include "pruitt/stats.hpp"

namespace pruitt {

// Cap policy: a fixed step cap when fixed > 0, otherwise
// ceil(multiplier / h(r)) per radius.
struct CapRule {
    double multiplier = 200.0;
    std::uint64_t fixed = 0;

    std::uint64_t resolve(const StepDistribution& dist, double r, std::uint64_t mc_samples,
                          std::uint64_t seed) const;
};

// One tested inequality instance: pass when lhs <= rhs + 3 * se.
struct BoundPoint {
    double r = 0.0;
    std::uint64_t n = 0;  // 0 when the bound has no n
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;
    double margin = 0.0;  // rhs + 3 se - lhs
};

struct BoundCheckResult {
    std::string id;
    std::vector<BoundPoint> points;
    double worst_margin = 0.0;
    bool pass = true;
    std::string note;

    void add(BoundPoint pt);
};

// ---------------------------------------------------------------------------
// Functionals suite: the functional table plus its structural identities.
// ---------------------------------------------------------------------------
struct FunctionalsSuiteReport {
    std::vector<PruittFunctionals> table;
    std::vector<Q2Report> q2;
    std::vector<HdCheck> hd;
    bool g_monotone = true;        // G nonincreasing along the grid
    bool rk_monotone = true;       // r^2 (G + K) nondecreasing along the grid
    double hmin_lhs = 0.0;         // h at the smallest grid radius
    double hmin_rhs = 0.0;         // P(||X|| > 0) minus CI
    double worst_q2_residual = 0.0;
    bool pass = true;
};
FunctionalsSuiteReport run_functionals_suite(const StepDistribution& dist,
                                             std::span<const double> r_grid, int extra_hd_pairs,
                                             std::uint64_t mc_samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Exit suite rows shared by several suites.
// ---------------------------------------------------------------------------
struct ExitRow {
    double r = 0.0;
    PruittFunctionals f;
    ExitTimeEstimate est;
    double product = 0.0;     // mean_T * h
    double product_ci = 0.0;  // first-order propagated
    bool excluded = false;    // censoring made the estimate unreliable
};

std::vector<ExitRow> run_exit_rows(const StepDistribution& dist, std::span<const double> r_grid,
                                   std::uint64_t paths, std::uint64_t seed, const CapRule& cap,
                                   std::uint64_t mc_samples, std::uint64_t job_base = 0,
                                   std::span<const std::uint64_t> extra_tail_n = {});

// ---------------------------------------------------------------------------
// Pruitt suite: the distribution/expectation bound pair on one space.
// ---------------------------------------------------------------------------
struct PruittSuiteReport {
    std::vector<ExitRow> rows;
    double sup_product = 0.0;  // sup ET * h        (empirical upper constant)
    double inf_product = 0.0;  // inf ET * h        (empirical lower constant)
    double sup_tail_upper = 0.0;  // sup n P(T > n) h
    double sup_tail_lower = 0.0;  // sup P(T <= n) / (n h)
    double band = 0.0;            // sup_product / inf_product
    double budget = 0.0;
    bool two_sided = false;  // p == 2: the band check applies
    std::vector<BoundCheckResult> checks;
    bool pass = true;
    std::string note;
};
PruittSuiteReport run_pruitt_suite(const StepDistribution& dist, std::span<const double> r_grid,
                                   std::uint64_t paths, std::uint64_t seed, double band_budget,
                                   const CapRule& cap, std::uint64_t mc_samples);

// ---------------------------------------------------------------------------
// Scaling experiment: random k-subset walks across dimensions, with the
// fixed-subset control.
// ---------------------------------------------------------------------------
struct ScalingRow {
    double r = 0.0;
    double h = 0.0;
    double mean_T = 0.0;
    double ci_T = 0.0;
    double product = 0.0;
    double product_ci = 0.0;
};
struct ScalingFamily {
    int d = 0;
    std::vector<ScalingRow> rows;
    double plateau = 0.0;         // median product over the top half of the grid
    double plateau_spread = 0.0;  // max/min over the top half
};
struct ScalingReport {
    double p = 2.0;
    int k = 1;
    std::vector<ScalingFamily> families;
    SlopeFit slope;  // ln(plateau) against ln(d)
    ScalingFamily control;
    double control_band = 0.0;
    double budget = 4.0;
    bool pass = true;
};
ScalingReport run_scaling_experiment(double p, std::span<const int> d_list, int k,
                                     std::span<const double> r_grid, std::uint64_t paths,
                                     std::uint64_t seed, double budget, const CapRule& cap);

// ---------------------------------------------------------------------------
// Gaussian-associate bounds: ET_r against r^2 / E||G||^2 in both directions.
// ---------------------------------------------------------------------------
struct GaussianBoundsRow {
    double r = 0.0;
    double mean_T = 0.0;
    double ci_T = 0.0;
    double eg2_trunc = 0.0;     // E||G(X-hat)||^2 surrogate at cutoff 3r
    double eg2 = 0.0;           // E||G(X)||^2 surrogate
    double upper_ratio = 0.0;   // ET * eg2_trunc / r^2   (bounded above)
    double lower_ratio = 0.0;   // ET * eg2 / r^2         (bounded below, large r)
    double glt_lp_moment = 0.0; // E||G(X-hat)||^p (monotone in r)
};
struct GaussianBoundsReport {
    std::vector<GaussianBoundsRow> rows;
    double sup_upper = 0.0;
    double inf_lower = 0.0;
    double upper_band = 0.0;  // top-half max/min of upper_ratio
    double lower_band = 0.0;  // top-half max/min of lower_ratio
    bool glt_monotone = true;
    bool glt_analytic = true;
    double budget = 4.0;
    bool pass = true;
};
GaussianBoundsReport run_gaussian_bounds(const StepDistribution& dist,
                                         std::span<const double> r_grid, std::uint64_t paths,
                                         std::uint64_t seed, double budget, const CapRule& cap,
                                         std::uint64_t mc_samples);

// ---------------------------------------------------------------------------
// Type-witness convergence: E||S_n||^2 / n against the Gaussian-sum limit.
// ---------------------------------------------------------------------------
struct WitnessRow {
    std::uint64_t n = 0;
    double ratio = 0.0;  // E||S_n||^2 / n
    double ci = 0.0;
};
struct WitnessReport {
    std::vector<WitnessRow> rows;
    double gaussian_limit = 0.0;  // MC estimate of E||sum_j g_j x_j||^2
    double gaussian_ci = 0.0;
    double step_sq_norm = 0.0;  // analytic E||X||^2
    double sum_sq_norms = 0.0;  // sum_j ||x_j||^2
    double final_gap = 0.0;
    double tol = 0.0;
    bool pass = true;
};
WitnessReport run_type_witness_convergence(const std::vector<Vector>& vectors, SpaceSpec space,
                                           std::span<const std::uint64_t> n_grid,
                                           std::uint64_t paths, std::uint64_t seed, double tol);

// ---------------------------------------------------------------------------
// Constant-tracking implications of the doubling lemmas.
// ---------------------------------------------------------------------------
struct LemmaReport {
    double c_low = 0.0;      // inf ET * h over the estimated radii
    double c_up = 0.0;       // sup ET * h
    double c_doubling = 0.0; // sup P(T <= n) / (n h)
    double c_tail = 0.0;     // sup n P(T > n) h
    std::vector<BoundCheckResult> checks;
    bool pass = true;
};
LemmaReport run_lemma_implication_checks(const StepDistribution& dist,
                                         std::span<const double> r_grid,
                                         std::span<const std::uint64_t> n_grid,
                                         std::uint64_t paths, std::uint64_t seed,
                                         const CapRule& cap, std::uint64_t mc_samples);

// de Acosta variance inequality Var(||S_n||) <= 4 n E||X||^2 on an n grid.
BoundCheckResult run_de_acosta_check(const StepDistribution& dist,
                                     std::span<const std::uint64_t> n_grid, std::uint64_t paths,
                                     std::uint64_t seed);

}  // namespace pruitt

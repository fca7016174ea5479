#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pruitt/distributions.hpp"
#include "pruitt/streams.hpp"

namespace pruitt {

// One simulated path: the exit index T_r = min{n : ||S_n|| > r} (strict), or
// censoring at the step cap with ||S_cap|| <= r.
struct ExitSample {
    bool exited = false;
    std::uint64_t n = 0;  // T when exited, cap when censored

    bool operator==(const ExitSample&) const = default;
};

struct TailRow {
    std::uint64_t n = 0;
    double p_gt = 0.0;  // P(T_r > n), exact under censoring for n <= cap
    double ci_lo = 0.0;
    double ci_hi = 1.0;

    bool operator==(const TailRow&) const = default;
};

struct ExitTimeEstimate {
    double r = 0.0;
    std::uint64_t paths = 0;
    std::uint64_t exited = 0;
    std::uint64_t censored = 0;
    std::uint64_t cap = 0;
    // Moments over exited paths only; a lower bound on E T_r when censoring
    // occurred.
    double mean_T = 0.0;
    double var_T = 0.0;
    double ci_halfwidth = 0.0;  // 95%, normal approximation
    bool lower_bound_only = false;
    bool unreliable = false;  // censored fraction > 1%
    std::vector<TailRow> tail;
    std::uint64_t seed = 0;
    std::uint64_t stream_base = 0;

    bool operator==(const ExitTimeEstimate&) const = default;
};

struct SnStats {
    std::uint64_t n = 0;
    double mean_norm = 0.0;
    double ci_mean_norm = 0.0;
    double mean_sq = 0.0;  // E ||S_n||^2 estimate
    double ci_mean_sq = 0.0;
    double var_norm = 0.0;  // Var(||S_n||) estimate
    double var_norm_se = 0.0;

    bool operator==(const SnStats&) const = default;
};

ExitSample simulate_exit(const StepDistribution& dist, double r, std::uint64_t cap, RngStream& rng);

// Same walk with every step passed through the 3r radial clip.
ExitSample simulate_exit_truncated(const StepDistribution& dist, double r, std::uint64_t cap,
                                   RngStream& rng);

// Test/debug variant: the observer sees (n, S_n, exited) after every step.
ExitSample simulate_exit_observed(
    const StepDistribution& dist, double r, std::uint64_t cap, RngStream& rng,
    const std::function<void(std::uint64_t, const Vector&, bool)>& on_step);

// ceil(multiplier / h(r)) with h from the analytic path when available, MC
// otherwise. Censored counts are always reported by the estimators.
std::uint64_t default_cap(const StepDistribution& dist, double r, double multiplier = 200.0,
                          std::uint64_t mc_samples = 100000, std::uint64_t seed = 1);

// Path-parallel estimate; deterministic for fixed (seed, stream_base)
// regardless of worker count. extra_tail_n adds rows to the tail grid.
ExitTimeEstimate estimate_exit_time(const StepDistribution& dist, double r, std::uint64_t paths,
                                    std::uint64_t cap, std::uint64_t seed,
                                    std::uint64_t stream_base = stream_salt::kExitPaths,
                                    std::span<const std::uint64_t> extra_tail_n = {});

// Paired-path check that the 3r clip leaves exit times unchanged.
struct PairedTruncationReport {
    std::uint64_t paths = 0;
    std::uint64_t mismatches = 0;
    std::int64_t first_mismatch_path = -1;
};
PairedTruncationReport exit_equals_truncated_exit(const StepDistribution& dist, double r,
                                                  std::uint64_t paths, std::uint64_t cap,
                                                  std::uint64_t seed,
                                                  std::uint64_t stream_base = stream_salt::kExitPaths);

// ||S_n|| statistics on a fixed n grid (sorted ascending).
std::vector<SnStats> sn_statistics(const StepDistribution& dist,
                                   std::span<const std::uint64_t> n_grid, std::uint64_t paths,
                                   std::uint64_t seed,
                                   std::uint64_t stream_base = stream_salt::kSnStats);

}  // namespace pruitt

// Acceptance suite: one criterion per function, one [PASS]/[FAIL] line each.
// Tolerances, grids, seeds and runtime limits are pinned here; exit status is
// the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pruitt/config.hpp"
#include "pruitt/harness.hpp"
#include "pruitt/parallel.hpp"
#include "pruitt/runner.hpp"

using namespace pruitt;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

StepDistribution scalar_pm1() {
    return StepDistribution::discrete_radial(SpaceSpec(1, 2.0), {1.0}, {1.0}, AxisMode::Fixed);
}

StepDistribution heavy_mixture() {
    return StepDistribution::discrete_radial(SpaceSpec(2, 2.0), {0.5, 2.0, 100.0},
                                             {0.5, 0.4, 0.1}, AxisMode::UniformRandom);
}

// The analytic-law zoo instances exercised by criterion 2.
std::vector<StepDistribution> analytic_zoo() {
    std::vector<StepDistribution> zoo;
    zoo.push_back(scalar_pm1());
    zoo.push_back(StepDistribution::fixed_subset_rademacher(SpaceSpec(6, 4.0), {0, 2, 4},
                                                            {1.0, 0.5, 0.25}));
    zoo.push_back(StepDistribution::random_subset_rademacher(SpaceSpec(8, 4.0), 2,
                                                             Vector(8, 1.0)));
    zoo.push_back(StepDistribution::discrete_radial(SpaceSpec(4, 3.0), {0.5, 1.0, 3.0},
                                                    {0.5, 0.3, 0.2}, AxisMode::UniformRandom));
    zoo.push_back(StepDistribution::type_witness(SpaceSpec(3, 2.0),
                                                 {{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}}));
    zoo.push_back(StepDistribution::point_mass(SpaceSpec(2, 2.0), {0.6, -0.8}));
    zoo.push_back(StepDistribution::shifted(
        StepDistribution::discrete_radial(SpaceSpec(2, 2.0), {1.0}, {1.0}, AxisMode::Fixed),
        {0.25, -0.5}));
    return zoo;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// --------------------------------------------------------------------------
// 1. Gambler's-ruin oracle.
// --------------------------------------------------------------------------
Outcome criterion1() {
    Outcome out;
    const auto dist = scalar_pm1();
    // The oracle first: the dense chain solve must reproduce the closed form.
    for (int m : {11, 21, 51}) {
        const auto sol = oracle::gambler_ruin_solve(m);
        out.require(std::fabs(sol.mean - static_cast<double>(m) * m) < 1e-8,
                    "chain solve != m^2 at m=" + std::to_string(m));
    }
    for (double r : {10.0, 20.0, 50.0}) {
        const double expect = oracle::gambler_ruin_mean(r);
        const auto est = estimate_exit_time(
            dist, r, 100000, static_cast<std::uint64_t>(400.0 * r * r), 20240601);
        const double rel = std::fabs(est.mean_T - expect) / expect;
        out.require(est.censored == 0, "censored paths at r=" + fmt(r));
        out.require(rel < 0.01, "ET off by " + fmt(100.0 * rel) + "% at r=" + fmt(r));
        if (r == 10.0) {
            // CI scale pinned by the chain solve: 1.96 sqrt(Var/1e5) ~ 0.61.
            const double ci_expect =
                1.96 * std::sqrt(oracle::gambler_ruin_solve(11).variance / 1e5);
            out.require(std::fabs(est.ci_halfwidth - ci_expect) < 0.25 * ci_expect,
                        "ci " + fmt(est.ci_halfwidth) + " far from solve's " + fmt(ci_expect));
            out.note("ET(10)=" + fmt(est.mean_T) + " vs 121, ci " + fmt(est.ci_halfwidth));
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// 2. Functional identities.
// --------------------------------------------------------------------------
Outcome criterion2() {
    Outcome out;
    const auto zoo = analytic_zoo();
    double worst_q2 = 0.0;
    for (const auto& dist : zoo) {
        const double scale = dist.norm_law()->max_radius();
        const auto grid = geometric_grid(0.3 * scale, 8.0 * scale, 8);
        for (double r : grid) {
            const auto q2 = check_q2_identity(dist, r);
            worst_q2 = std::max(worst_q2, q2.residual);
            const auto f = functionals_analytic(dist, r);
            out.require(f.h <= 2.0 + 1e-12, "h > 2 at r=" + fmt(r));
        }
    }
    out.require(worst_q2 < 1e-12, "worst q2 residual " + fmt(worst_q2));
    out.note("worst q2 residual " + fmt(worst_q2));

    // ~200 random (r <= s) pairs across the zoo.
    RngStream rng(2024, 0);
    int pairs = 0;
    int pair_failures = 0;
    while (pairs < 200) {
        for (const auto& dist : zoo) {
            if (pairs >= 200) break;
            const double scale = dist.norm_law()->max_radius();
            double a = scale * std::pow(10.0, rng.next_unit() * 2.0 - 1.0);
            double b = scale * std::pow(10.0, rng.next_unit() * 2.0 - 1.0);
            if (a > b) std::swap(a, b);
            if (!check_hd_bounds(functionals_analytic(dist, a), functionals_analytic(dist, b))
                     .pass) {
                ++pair_failures;
            }
            ++pairs;
        }
    }
    out.require(pair_failures == 0,
                std::to_string(pair_failures) + " hd pair failures of " + std::to_string(pairs));
    out.note(std::to_string(pairs) + " hd pairs");

    // Terminal r^2 h / E||X||^2 for the mean-zero bounded variants.
    for (const auto& dist : zoo) {
        if (!dist.symmetric()) continue;
        const double scale = dist.norm_law()->max_radius();
        const auto grid = geometric_grid(0.3 * scale, 8.0 * scale, 8);
        const auto rep = check_h_limit(dist, grid, 10000, 2);
        out.require(rep.terminal_gap < 0.05,
                    dist.variant_name() + " terminal gap " + fmt(rep.terminal_gap));
    }
    return out;
}

// --------------------------------------------------------------------------
// 3. Truncation correctness.
// --------------------------------------------------------------------------
Outcome criterion3() {
    Outcome out;
    const auto dist = heavy_mixture();
    const std::uint64_t cap = default_cap(dist, 5.0, 200.0, 100000, 3);
    const auto paired = exit_equals_truncated_exit(dist, 5.0, 10000, cap, 20240603);
    out.require(paired.mismatches == 0,
                std::to_string(paired.mismatches) + " truncation mismatches");
    out.note("10000 paired paths agree");

    const auto qx = truncated_moment_identity(dist, 5.0, 1000000, 20240604);
    out.require(qx.within_ci, "QX residual " + fmt(qx.residual) + " beyond CI");
    out.note("QX residual " + fmt(qx.residual) + " (3 s.e. = " + fmt(3.0 * qx.combined_se) + ")");
    return out;
}

// --------------------------------------------------------------------------
// 4. de Acosta inequality across the zoo.
// --------------------------------------------------------------------------
Outcome criterion4() {
    Outcome out;
    std::vector<StepDistribution> zoo;
    zoo.push_back(scalar_pm1());
    zoo.push_back(StepDistribution::fixed_subset_rademacher(SpaceSpec(6, 4.0), {0, 2, 4},
                                                            {1.0, 0.5, 0.25}));
    zoo.push_back(StepDistribution::random_subset_rademacher(SpaceSpec(8, 4.0), 2,
                                                             Vector(8, 1.0)));
    zoo.push_back(StepDistribution::gaussian_steps(SpaceSpec(4, 2.0), {1.0, 2.0, 0.5, 1.0}));
    zoo.push_back(StepDistribution::discrete_radial(SpaceSpec(4, 3.0), {0.5, 1.0, 3.0},
                                                    {0.5, 0.3, 0.2}, AxisMode::UniformRandom));
    zoo.push_back(StepDistribution::type_witness(SpaceSpec(3, 2.0),
                                                 {{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}}));
    zoo.push_back(StepDistribution::shifted(
        StepDistribution::gaussian_steps(SpaceSpec(2, 2.0), {1.0, 1.0}), {0.5, -0.25}));
    zoo.push_back(StepDistribution::point_mass(SpaceSpec(2, 2.0), {0.6, -0.8}));

    const std::vector<std::uint64_t> n_grid{1, 4, 16, 64, 256};
    std::uint64_t seed = 20240610;
    double worst = 1e300;
    for (const auto& dist : zoo) {
        const auto check = run_de_acosta_check(dist, n_grid, 100000, seed++);
        worst = std::min(worst, check.worst_margin);
        out.require(check.pass, dist.variant_name() + " violates the variance bound");
    }
    out.note("8 variants, worst margin " + fmt(worst));
    return out;
}

// --------------------------------------------------------------------------
// 5. Markov and doubling bounds on the tail grid.
// --------------------------------------------------------------------------
Outcome criterion5() {
    Outcome out;
    std::vector<StepDistribution> dists;
    dists.push_back(scalar_pm1());
    dists.push_back(StepDistribution::gaussian_steps(SpaceSpec(2, 2.0), {1.0, 1.0}));
    std::uint64_t seed = 20240615;
    for (const auto& dist : dists) {
        for (double r : {8.0, 16.0}) {
            const std::uint64_t cap = default_cap(dist, r, 200.0, 200000, 5);
            const std::uint64_t cap2 = default_cap(dist, 2.0 * r, 200.0, 200000, 5);
            const auto est = estimate_exit_time(dist, r, 100000, cap, seed);
            const auto est2 = estimate_exit_time(dist, 2.0 * r, 100000, cap2, seed + 1);
            seed += 2;
            const double se_T = est.ci_halfwidth / 1.96;
            for (const auto& t : est.tail) {
                const double n = static_cast<double>(t.n);
                const double se_p = (t.ci_hi - t.ci_lo) / (2.0 * 1.96);
                const double se = std::hypot(se_p, se_T / n);
                out.require(t.p_gt <= est.mean_T / n + 3.0 * se,
                            dist.variant_name() + ": Markov bound fails at r=" + fmt(r) +
                                ", n=" + std::to_string(t.n));
            }
            for (const auto& t : est2.tail) {
                const double n = static_cast<double>(t.n);
                const double se_p = (t.ci_hi - t.ci_lo) / (2.0 * 1.96);
                const double se = std::hypot(se_p, n * se_T / (est.mean_T * est.mean_T));
                out.require(1.0 - t.p_gt <= n / est.mean_T + 3.0 * se,
                            dist.variant_name() + ": doubling bound fails at r=" + fmt(r) +
                                ", n=" + std::to_string(t.n));
            }
        }
    }
    out.note("tail grids at r in {8,16}, doubling at {16,32}");
    return out;
}

// --------------------------------------------------------------------------
// 6. Hilbert-case Pruitt suite: factor-10 band, no widening with d.
// --------------------------------------------------------------------------
Outcome criterion6() {
    Outcome out;
    const auto grid = geometric_grid(4.0, 13.45, 8);
    std::vector<double> bands;
    std::uint64_t seed = 20240620;
    for (int d : {1, 2, 8}) {
        const auto dist = StepDistribution::gaussian_steps(
            SpaceSpec(d, 2.0), Vector(static_cast<std::size_t>(d), 1.0));
        const auto rep = run_pruitt_suite(dist, grid, 10000, seed++, 10.0, CapRule{}, 200000);
        out.require(rep.pass, "gaussian d=" + std::to_string(d) + " suite failed");
        out.require(rep.band <= 10.0,
                    "band " + fmt(rep.band) + " exceeds 10 at d=" + std::to_string(d));
        bands.push_back(rep.band);
    }
    // Dimension independence: the largest-d band stays within twice the
    // smallest-d band (the factor covers CI noise).
    out.require(bands.back() <= 2.0 * bands.front() + 1e-9,
                "band widened: d=8 gives " + fmt(bands.back()) + " vs d=1 " + fmt(bands.front()));
    out.note("bands " + fmt(bands[0]) + ", " + fmt(bands[1]) + ", " + fmt(bands[2]));

    // Fixed-subset controls at p = 2.
    for (int k : {1, 4}) {
        std::vector<int> subset(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
        const auto control = StepDistribution::fixed_subset_rademacher(
            SpaceSpec(k, 2.0), subset, Vector(static_cast<std::size_t>(k), 1.0));
        const auto rep = run_pruitt_suite(control, grid, 10000, seed++, 10.0, CapRule{}, 100000);
        out.require(rep.pass && rep.band <= 10.0,
                    "control k=" + std::to_string(k) + " band " + fmt(rep.band));
    }
    return out;
}

// --------------------------------------------------------------------------
// 7. Fixed-subset control flatness at p = 4.
// --------------------------------------------------------------------------
Outcome criterion7() {
    Outcome out;
    const auto control = StepDistribution::fixed_subset_rademacher(SpaceSpec(4, 4.0),
                                                                   {0, 1, 2, 3}, Vector(4, 1.0));
    const auto grid = geometric_grid(4.0, 13.45, 8);
    const auto rows = run_exit_rows(control, grid, 10000, 20240625, CapRule{}, 100000);
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
        lo = std::min(lo, rows[i].product);
        hi = std::max(hi, rows[i].product);
    }
    out.require(hi / lo <= 4.0, "plateau spread " + fmt(hi / lo) + " exceeds 4");
    out.note("top-half spread " + fmt(hi / lo) + ", plateau ~" + fmt(0.5 * (lo + hi)));
    return out;
}

// --------------------------------------------------------------------------
// 8. Random-subset scaling exponent.
// --------------------------------------------------------------------------
Outcome criterion8() {
    Outcome out;
    const auto grid = geometric_grid(5.66, 19.03, 8);
    const std::vector<int> dims{4, 16, 64};
    const auto rep4 = run_scaling_experiment(4.0, dims, 1, grid, 10000, 20240630, 4.0, CapRule{});
    out.require(std::fabs(rep4.slope.slope - 0.5) <= 0.15,
                "p=4 slope " + fmt(rep4.slope.slope) + " outside 0.5 +/- 0.15");
    out.note("p=4 slope " + fmt(rep4.slope.slope) + " +/- " + fmt(rep4.slope.slope_se));

    const auto rep2 = run_scaling_experiment(2.0, dims, 1, grid, 10000, 20240631, 4.0, CapRule{});
    out.require(std::fabs(rep2.slope.slope) <= 0.1,
                "p=2 control slope " + fmt(rep2.slope.slope) + " outside 0 +/- 0.1");
    out.note("p=2 slope " + fmt(rep2.slope.slope));
    return out;
}

// --------------------------------------------------------------------------
// 9. Type-witness convergence.
// --------------------------------------------------------------------------
Outcome criterion9() {
    Outcome out;
    const std::vector<std::uint64_t> n_grid{1, 10, 100, 1000};
    const auto rep = run_type_witness_convergence({{1.0, 0.0}, {0.0, 1.0}}, SpaceSpec(2, 2.0),
                                                  n_grid, 10000, 20240640, 0.1);
    out.require(std::fabs(rep.step_sq_norm - rep.sum_sq_norms) < 1e-12,
                "second-moment identity broken");
    const double final_ratio = rep.rows.back().ratio;
    out.require(std::fabs(final_ratio - 2.0) < 0.1,
                "E||S_n||^2/n = " + fmt(final_ratio) + " at n=1000, not within 0.1 of 2");
    out.require(rep.pass, "gap vs Gaussian-sum estimate beyond tolerance");
    out.note("ratio(1000) = " + fmt(final_ratio) + ", Gaussian-sum limit " +
             fmt(rep.gaussian_limit));
    return out;
}

// --------------------------------------------------------------------------
// 10. Determinism across worker counts, through the config runner.
// --------------------------------------------------------------------------
Outcome criterion10() {
    Outcome out;
    const char* kConfigs[] = {
        // functionals on the scalar +/-1 walk (criterion-2 style)
        "suite = functionals\nseed = 42\nspace.d = 1\nspace.p = 2.0\n"
        "dist.variant = discrete_radial\ndist.radii = [1.0]\ndist.probs = [1.0]\n"
        "dist.axis = fixed\nr_grid.min = 0.5\nr_grid.max = 8.0\nr_grid.points = 8\n"
        "mc.samples = 50000\n",
        // pruitt on gaussian d=2 (criterion-5/6 style)
        "suite = pruitt\nseed = 77\nspace.d = 2\nspace.p = 2.0\n"
        "dist.variant = gaussian_steps\ndist.sigma = 1.0\n"
        "r_grid.min = 8.0\nr_grid.max = 16.0\nr_grid.points = 3\n"
        "paths = 5000\nmc.samples = 50000\n",
    };
    const auto base = std::filesystem::temp_directory_path() / "pruitt_acceptance_det";
    std::filesystem::remove_all(base);
    int cfg_idx = 0;
    for (const char* text : kConfigs) {
        const auto cfg = ExperimentConfig::from_kv_text(text);
        const auto dir1 = base / ("cfg" + std::to_string(cfg_idx) + "_w1");
        const auto dir8 = base / ("cfg" + std::to_string(cfg_idx) + "_w8");
        set_worker_count(1);
        const auto res1 = run_config(cfg, dir1.string());
        set_worker_count(8);
        const auto res8 = run_config(cfg, dir8.string());
        set_worker_count(0);
        out.require(res1.files.size() == res8.files.size(), "file lists differ");
        for (std::size_t i = 0; i < res1.files.size(); ++i) {
            std::ifstream a(res1.files[i], std::ios::binary);
            std::ifstream b(res8.files[i], std::ios::binary);
            std::stringstream sa, sb;
            sa << a.rdbuf();
            sb << b.rdbuf();
            out.require(sa.str() == sb.str(),
                        std::filesystem::path(res1.files[i]).filename().string() +
                            " differs between 1 and 8 workers");
        }
        ++cfg_idx;
    }
    std::filesystem::remove_all(base);
    out.note("2 configs, every output byte-identical at 1 vs 8 workers");
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0 = none stated
    std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const std::vector<Criterion> criteria{
        {1, "gambler's-ruin oracle (ET within 1% at r=10,20,50)", 60.0, criterion1},
        {2, "functional identities (Q2 < 1e-12, hd pairs, h <= 2, r^2 h limit)", 10.0, criterion2},
        {3, "truncation correctness (paired exits, QX moment identity)", 0.0, criterion3},
        {4, "de Acosta variance bound across the zoo", 120.0, criterion4},
        {5, "Markov/doubling tail bounds at r in {8,16}", 0.0, criterion5},
        {6, "Hilbert-case product band, dimension-independent", 0.0, criterion6},
        {7, "fixed-subset flatness at p=4", 0.0, criterion7},
        {8, "random-subset scaling exponent (slope 0.5 +/- 0.15; p=2 control)", 600.0, criterion8},
        {9, "type-witness convergence at n=1000", 0.0, criterion9},
        {10, "worker-count determinism of CSV outputs", 0.0, criterion10},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + std::string("runtime ") +
                          std::to_string(secs) + "s exceeds " + std::to_string(c.time_limit_s) +
                          "s";
        }
        std::printf("[%s] criterion %d: %s%s%s [%.1fs]\n", out.pass ? "PASS" : "FAIL", c.id,
                    c.name, out.detail.empty() ? "" : " -- ", out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}

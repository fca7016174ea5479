#include "pruitt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "pruitt/parallel.hpp"

namespace pruitt {
namespace {

constexpr double kSlack = 1e-9;

double wilson_se(const TailRow& row) { return (row.ci_hi - row.ci_lo) / (2.0 * 1.96); }

double est_se(const ExitTimeEstimate& est) { return est.ci_halfwidth / 1.96; }

// Median of the rows covering the top half of the grid.
template <typename Rows, typename Get>
double top_half_median(const Rows& rows, Get&& get) {
    const std::size_t count = rows.size();
    if (count == 0) return 0.0;
    const std::size_t start = count / 2;
    std::vector<double> vals;
    for (std::size_t i = start; i < count; ++i) vals.push_back(get(rows[i]));
    std::sort(vals.begin(), vals.end());
    const std::size_t m = vals.size();
    return m % 2 == 1 ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
}

template <typename Rows, typename Get>
double top_half_spread(const Rows& rows, Get&& get) {
    const std::size_t count = rows.size();
    if (count == 0) return 0.0;
    const std::size_t start = count / 2;
    double lo = get(rows[start]);
    double hi = lo;
    for (std::size_t i = start; i < count; ++i) {
        lo = std::min(lo, get(rows[i]));
        hi = std::max(hi, get(rows[i]));
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

void require_non_degenerate(const StepDistribution& dist, const char* suite) {
    if (dist.degenerate()) {
        throw std::invalid_argument(std::string(suite) +
                                    ": degenerate (point-mass) distributions are excluded");
    }
}

}  // namespace

std::uint64_t CapRule::resolve(const StepDistribution& dist, double r, std::uint64_t mc_samples,
                               std::uint64_t seed) const {
    if (fixed > 0) return fixed;
    return default_cap(dist, r, multiplier, mc_samples, seed);
}

void BoundCheckResult::add(BoundPoint pt) {
    pt.margin = pt.rhs + 3.0 * pt.se - pt.lhs;
    if (points.empty() || pt.margin < worst_margin) worst_margin = pt.margin;
    if (pt.margin < -kSlack) pass = false;
    points.push_back(pt);
}

// ---------------------------------------------------------------------------
// Functionals suite
// ---------------------------------------------------------------------------

FunctionalsSuiteReport run_functionals_suite(const StepDistribution& dist,
                                             std::span<const double> r_grid, int extra_hd_pairs,
                                             std::uint64_t mc_samples, std::uint64_t seed) {
    if (r_grid.empty()) throw std::invalid_argument("run_functionals_suite: empty r grid");
    FunctionalsSuiteReport rep;
    const bool analytic = has_analytic_functionals(dist);

    std::uint64_t job = 0;
    for (double r : r_grid) {
        rep.table.push_back(functionals_auto(dist, r, mc_samples, seed,
                                             stream_salt::kFunctionals +
                                                 stream_salt::job_offset(job++)));
    }

    for (double r : r_grid) {
        if (analytic && dist.norm_law()) {
            rep.q2.push_back(check_q2_identity(dist, r));
        } else {
            rep.q2.push_back(check_q2_identity_mc(dist, r, std::min<std::uint64_t>(mc_samples, 200000),
                                                  seed + 17));
        }
        rep.worst_q2_residual = std::max(rep.worst_q2_residual, rep.q2.back().residual);
        if (rep.q2.back().analytic) {
            if (rep.q2.back().residual > 1e-12) rep.pass = false;
        } else {
            if (rep.q2.back().residual > 10.0 * rep.q2.back().tol) rep.pass = false;
        }
    }

    // Grid pairs reuse the table; extra random pairs exercise off-grid radii.
    for (std::size_t i = 0; i < rep.table.size(); ++i) {
        for (std::size_t j = i; j < rep.table.size(); ++j) {
            rep.hd.push_back(check_hd_bounds(rep.table[i], rep.table[j]));
        }
    }
    if (extra_hd_pairs > 0 && analytic) {
        RngStream rng(seed, stream_salt::kGenericTests);
        const double lo = 0.5 * r_grid.front();
        const double hi = 2.0 * r_grid.back();
        for (int i = 0; i < extra_hd_pairs; ++i) {
            double a = lo * std::pow(hi / lo, rng.next_unit());
            double b = lo * std::pow(hi / lo, rng.next_unit());
            if (a > b) std::swap(a, b);
            rep.hd.push_back(
                check_hd_bounds(functionals_analytic(dist, a), functionals_analytic(dist, b)));
        }
    }
    for (const auto& hd : rep.hd) {
        if (!hd.pass) rep.pass = false;
    }

    for (std::size_t i = 1; i < rep.table.size(); ++i) {
        const auto& prev = rep.table[i - 1];
        const auto& cur = rep.table[i];
        const double slack_g = prev.ci_G + cur.ci_G + kSlack;
        if (cur.G > prev.G + slack_g) rep.g_monotone = false;
        const double prev_rk = prev.r * prev.r * (prev.G + prev.K);
        const double cur_rk = cur.r * cur.r * (cur.G + cur.K);
        const double slack_rk = prev.r * prev.r * (prev.ci_G + prev.ci_K) +
                                cur.r * cur.r * (cur.ci_G + cur.ci_K) + kSlack;
        if (cur_rk < prev_rk - slack_rk) rep.rk_monotone = false;
    }
    if (!rep.g_monotone || !rep.rk_monotone) rep.pass = false;

    // h stays bounded away from 0 near r -> 0: h(r_min) >= P(||X|| > 0) - CI.
    const auto& first = rep.table.front();
    rep.hmin_lhs = first.h;
    if (const auto law = dist.norm_law()) {
        rep.hmin_rhs = (1.0 - law->mass_at_zero()) - first.ci_h;
        if (first.r < law->min_positive_radius() && rep.hmin_lhs < rep.hmin_rhs - kSlack) {
            rep.pass = false;
        }
    } else {
        rep.hmin_rhs = first.G - first.ci_G;  // h >= G always
        if (rep.hmin_lhs < rep.hmin_rhs - kSlack) rep.pass = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Exit rows
// ---------------------------------------------------------------------------

std::vector<ExitRow> run_exit_rows(const StepDistribution& dist, std::span<const double> r_grid,
                                   std::uint64_t paths, std::uint64_t seed, const CapRule& cap,
                                   std::uint64_t mc_samples, std::uint64_t job_base,
                                   std::span<const std::uint64_t> extra_tail_n) {
    std::vector<ExitRow> rows;
    std::uint64_t job = job_base;
    for (double r : r_grid) {
        ExitRow row;
        row.r = r;
        row.f = functionals_auto(dist, r, mc_samples, seed,
                                 stream_salt::kFunctionals + stream_salt::job_offset(job));
        const std::uint64_t cap_n = cap.resolve(dist, r, mc_samples, seed);
        row.est = estimate_exit_time(dist, r, paths, cap_n, seed,
                                     stream_salt::kExitPaths + stream_salt::job_offset(job),
                                     extra_tail_n);
        row.product = row.est.mean_T * row.f.h;
        row.product_ci = row.f.h * row.est.ci_halfwidth + row.est.mean_T * row.f.ci_h;
        row.excluded = row.est.unreliable;
        rows.push_back(std::move(row));
        ++job;
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Pruitt suite
// ---------------------------------------------------------------------------

PruittSuiteReport run_pruitt_suite(const StepDistribution& dist, std::span<const double> r_grid,
                                   std::uint64_t paths, std::uint64_t seed, double band_budget,
                                   const CapRule& cap, std::uint64_t mc_samples) {
    require_non_degenerate(dist, "run_pruitt_suite");
    if (r_grid.empty()) throw std::invalid_argument("run_pruitt_suite: empty r grid");

    PruittSuiteReport rep;
    rep.budget = band_budget;
    rep.two_sided = dist.space().p == 2.0;
    rep.rows = run_exit_rows(dist, r_grid, paths, seed, cap, mc_samples);

    BoundCheckResult markov{"markov_P(T>n)<=ET/n", {}, 0.0, true, ""};
    bool any = false;
    for (const auto& row : rep.rows) {
        if (row.excluded) {
            rep.note += "r=" + std::to_string(row.r) + " excluded (censoring); ";
            continue;
        }
        if (!any) {
            rep.sup_product = rep.inf_product = row.product;
            any = true;
        } else {
            rep.sup_product = std::max(rep.sup_product, row.product);
            rep.inf_product = std::min(rep.inf_product, row.product);
        }
        const double h = row.f.h;
        for (const auto& t : row.est.tail) {
            const double n = static_cast<double>(t.n);
            rep.sup_tail_upper = std::max(rep.sup_tail_upper, n * t.p_gt * h);
            rep.sup_tail_lower = std::max(rep.sup_tail_lower, (1.0 - t.p_gt) / (n * h));
            if (row.est.censored == 0) {
                BoundPoint pt;
                pt.r = row.r;
                pt.n = t.n;
                pt.lhs = t.p_gt;
                pt.rhs = row.est.mean_T / n;
                pt.se = std::hypot(wilson_se(t), est_se(row.est) / n);
                markov.add(pt);
            }
        }
    }
    rep.checks.push_back(std::move(markov));
    rep.band = rep.inf_product > 0.0 ? rep.sup_product / rep.inf_product
                                     : std::numeric_limits<double>::infinity();
    rep.pass = any;
    for (const auto& c : rep.checks) {
        if (!c.pass) rep.pass = false;
    }
    if (rep.two_sided && rep.band > band_budget) rep.pass = false;
    return rep;
}

// ---------------------------------------------------------------------------
// Scaling experiment
// ---------------------------------------------------------------------------

ScalingReport run_scaling_experiment(double p, std::span<const int> d_list, int k,
                                     std::span<const double> r_grid, std::uint64_t paths,
                                     std::uint64_t seed, double budget, const CapRule& cap) {
    if (!(p >= 2.0)) throw std::invalid_argument("run_scaling_experiment: requires p >= 2");
    if (d_list.size() < 3) {
        throw std::invalid_argument("run_scaling_experiment: slope fit needs >= 3 dimensions");
    }
    for (int d : d_list) {
        if (k > d) throw std::invalid_argument("run_scaling_experiment: k must be <= every d");
    }

    ScalingReport rep;
    rep.p = p;
    rep.k = k;
    rep.budget = budget;

    const auto make_rows = [&](const StepDistribution& dist, std::uint64_t job_base) {
        std::vector<ScalingRow> rows;
        const auto exit_rows =
            run_exit_rows(dist, r_grid, paths, seed, cap, 100000, job_base);
        for (const auto& er : exit_rows) {
            rows.push_back({er.r, er.f.h, er.est.mean_T, er.est.ci_halfwidth, er.product,
                            er.product_ci});
        }
        return rows;
    };

    std::uint64_t job_base = 0;
    for (int d : d_list) {
        const auto dist = StepDistribution::random_subset_rademacher(
            SpaceSpec(d, p), k, std::vector<double>(static_cast<std::size_t>(d), 1.0));
        ScalingFamily fam;
        fam.d = d;
        fam.rows = make_rows(dist, job_base);
        job_base += 64;
        fam.plateau = top_half_median(fam.rows, [](const ScalingRow& r) { return r.product; });
        fam.plateau_spread =
            top_half_spread(fam.rows, [](const ScalingRow& r) { return r.product; });
        if (fam.plateau_spread > budget) rep.pass = false;
        rep.families.push_back(std::move(fam));
    }

    {
        std::vector<int> subset(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
        const auto control = StepDistribution::fixed_subset_rademacher(
            SpaceSpec(k, p), subset, std::vector<double>(static_cast<std::size_t>(k), 1.0));
        rep.control.d = k;
        rep.control.rows = make_rows(control, job_base);
        rep.control.plateau =
            top_half_median(rep.control.rows, [](const ScalingRow& r) { return r.product; });
        rep.control.plateau_spread =
            top_half_spread(rep.control.rows, [](const ScalingRow& r) { return r.product; });
        rep.control_band = rep.control.plateau_spread;
        if (rep.control_band > budget) rep.pass = false;
    }

    std::vector<double> ln_d, ln_plateau;
    for (const auto& fam : rep.families) {
        ln_d.push_back(std::log(static_cast<double>(fam.d)));
        ln_plateau.push_back(std::log(fam.plateau));
    }
    rep.slope = fit_line(ln_d, ln_plateau);
    return rep;
}

// ---------------------------------------------------------------------------
// Gaussian-associate bounds
// ---------------------------------------------------------------------------

GaussianBoundsReport run_gaussian_bounds(const StepDistribution& dist,
                                         std::span<const double> r_grid, std::uint64_t paths,
                                         std::uint64_t seed, double budget, const CapRule& cap,
                                         std::uint64_t mc_samples) {
    require_non_degenerate(dist, "run_gaussian_bounds");
    if (!dist.symmetric()) {
        throw std::invalid_argument("run_gaussian_bounds: requires a symmetric distribution");
    }
    if (!(dist.space().p >= 2.0)) {
        throw std::invalid_argument("run_gaussian_bounds: requires p >= 2");
    }

    GaussianBoundsReport rep;
    rep.budget = budget;

    const bool analytic_assoc = dist.analytic_moments().coord_sq.has_value();
    const GaussianAssociate g_full = analytic_assoc
                                         ? gaussian_associate(dist)
                                         : gaussian_associate_mc(dist, mc_samples, seed + 5);

    rep.glt_analytic = dist.truncated_coord_sq(3.0 * r_grid.front()).has_value();

    const auto exit_rows = run_exit_rows(dist, r_grid, paths, seed, cap, mc_samples);
    double prev_lp = -1.0;
    for (const auto& er : exit_rows) {
        GaussianBoundsRow row;
        row.r = er.r;
        row.mean_T = er.est.mean_T;
        row.ci_T = er.est.ci_halfwidth;
        const GaussianAssociate g_trunc =
            rep.glt_analytic ? gaussian_associate_truncated(dist, er.r)
                             : gaussian_associate_truncated_mc(dist, er.r, mc_samples, seed + 6);
        row.eg2_trunc = g_trunc.sq_surrogate;
        row.eg2 = g_full.sq_surrogate;
        row.upper_ratio = er.est.mean_T * row.eg2_trunc / (er.r * er.r);
        row.lower_ratio = er.est.mean_T * row.eg2 / (er.r * er.r);
        row.glt_lp_moment = g_trunc.lp_moment;
        if (rep.glt_analytic && row.glt_lp_moment < prev_lp - kSlack) rep.glt_monotone = false;
        prev_lp = row.glt_lp_moment;
        // Monotone convergence from below: E||G(X-hat)||^p <= E||G(X)||^p.
        if (rep.glt_analytic && analytic_assoc &&
            row.glt_lp_moment > g_full.lp_moment * (1.0 + 1e-9)) {
            rep.glt_monotone = false;
        }
        rep.rows.push_back(row);
    }

    rep.sup_upper = 0.0;
    rep.inf_lower = std::numeric_limits<double>::infinity();
    for (const auto& row : rep.rows) {
        rep.sup_upper = std::max(rep.sup_upper, row.upper_ratio);
        rep.inf_lower = std::min(rep.inf_lower, row.lower_ratio);
    }
    rep.upper_band = top_half_spread(rep.rows, [](const GaussianBoundsRow& r) { return r.upper_ratio; });
    rep.lower_band = top_half_spread(rep.rows, [](const GaussianBoundsRow& r) { return r.lower_ratio; });
    rep.pass = rep.upper_band <= budget && rep.lower_band <= budget &&
               (!rep.glt_analytic || rep.glt_monotone);
    return rep;
}

// ---------------------------------------------------------------------------
// Type-witness convergence
// ---------------------------------------------------------------------------

WitnessReport run_type_witness_convergence(const std::vector<Vector>& vectors, SpaceSpec space,
                                           std::span<const std::uint64_t> n_grid,
                                           std::uint64_t paths, std::uint64_t seed, double tol) {
    const auto dist = StepDistribution::type_witness(space, vectors);
    WitnessReport rep;
    rep.tol = tol;

    // Second-moment identity precheck: analytic E||X||^2 equals sum_j ||x_j||^2.
    rep.step_sq_norm = *dist.analytic_moments().sq_norm;
    rep.sum_sq_norms = 0.0;
    for (const auto& v : vectors) {
        const double norm = lp_norm(v, space);
        rep.sum_sq_norms += norm * norm;
    }

    const auto stats = sn_statistics(dist, n_grid, paths, seed);
    for (const auto& s : stats) {
        rep.rows.push_back(
            {s.n, s.mean_sq / static_cast<double>(s.n), s.ci_mean_sq / static_cast<double>(s.n)});
    }

    // Independent Gaussian-sum estimate of E||sum_j g_j x_j||^2.
    const auto d = static_cast<std::size_t>(space.d);
    const std::size_t nvec = vectors.size();
    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t blocks = block_count(paths, kBlock);
    std::vector<MomentAcc> partials(blocks);
    parallel_blocks(paths, kBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        Vector v(d);
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(seed, stream_salt::kGaussianSum + i);
            v.assign(d, 0.0);
            for (std::size_t j = 0; j < nvec; ++j) {
                const double g = rng.next_gaussian();
                for (std::size_t c = 0; c < d; ++c) v[c] += g * vectors[j][c];
            }
            const double norm = lp_norm(v, space);
            partials[b].add(norm * norm);
        }
    });
    const MomentAcc acc = merge_pairwise(partials);
    rep.gaussian_limit = acc.mean;
    rep.gaussian_ci = 1.96 * acc.sem();

    if (!rep.rows.empty()) {
        const auto& last = rep.rows.back();
        rep.final_gap = std::fabs(last.ratio - rep.gaussian_limit);
        rep.pass = rep.final_gap <= tol + 3.0 * (last.ci + rep.gaussian_ci) / 1.96;
    }
    if (std::fabs(rep.step_sq_norm - rep.sum_sq_norms) > 1e-12 * std::max(1.0, rep.sum_sq_norms)) {
        rep.pass = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Constant transfers between tail and expectation bounds
// ---------------------------------------------------------------------------

LemmaReport run_lemma_implication_checks(const StepDistribution& dist,
                                         std::span<const double> r_grid,
                                         std::span<const std::uint64_t> n_grid,
                                         std::uint64_t paths, std::uint64_t seed,
                                         const CapRule& cap, std::uint64_t mc_samples) {
    require_non_degenerate(dist, "run_lemma_implication_checks");
    if (r_grid.empty() || n_grid.empty()) {
        throw std::invalid_argument("run_lemma_implication_checks: empty grid");
    }

    // Estimate at every grid radius and its double; tails must resolve the
    // requested n values plus the 2n/3n points of the submultiplicative check.
    std::vector<std::uint64_t> tail_n(n_grid.begin(), n_grid.end());
    for (std::uint64_t n : n_grid) {
        tail_n.push_back(2 * n);
        tail_n.push_back(3 * n);
    }
    std::sort(tail_n.begin(), tail_n.end());
    tail_n.erase(std::unique(tail_n.begin(), tail_n.end()), tail_n.end());

    std::vector<double> radii(r_grid.begin(), r_grid.end());
    for (double r : r_grid) radii.push_back(2.0 * r);
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    struct Entry {
        PruittFunctionals f;
        ExitTimeEstimate est;
        std::map<std::uint64_t, TailRow> tails;
    };
    std::map<double, Entry> data;
    std::uint64_t job = 0;
    for (double r : radii) {
        Entry e;
        e.f = functionals_auto(dist, r, mc_samples, seed,
                               stream_salt::kFunctionals + stream_salt::job_offset(job));
        const std::uint64_t cap_n = cap.resolve(dist, r, mc_samples, seed);
        e.est = estimate_exit_time(dist, r, paths, cap_n, seed,
                                   stream_salt::kExitPaths + stream_salt::job_offset(job), tail_n);
        for (const auto& t : e.est.tail) e.tails[t.n] = t;
        data.emplace(r, std::move(e));
        ++job;
    }

    LemmaReport rep;
    rep.c_low = std::numeric_limits<double>::infinity();
    rep.c_up = 0.0;
    for (const auto& [r, e] : data) {
        const double product = e.est.mean_T * e.f.h;
        rep.c_low = std::min(rep.c_low, product);
        rep.c_up = std::max(rep.c_up, product);
        // Empirical constants over every tabulated tail point.
        for (const auto& t : e.est.tail) {
            const double nn = static_cast<double>(t.n);
            rep.c_doubling = std::max(rep.c_doubling, (1.0 - t.p_gt) / (nn * e.f.h));
            rep.c_tail = std::max(rep.c_tail, nn * t.p_gt * e.f.h);
        }
    }

    BoundCheckResult markov{"tail_markov", {}, 0.0, true, "P(T_r>n) <= ET_r/n"};
    BoundCheckResult doubling{"tail_doubling", {}, 0.0, true, "P(T_2r<=n) <= n/ET_r"};
    BoundCheckResult submult{"tail_submultiplicative", {}, 0.0, true,
                             "P(T_r>kn) <= P(T_2r>n)^k, k=2,3"};
    BoundCheckResult l22_fwd{"early_exit_from_mean_lower", {}, 0.0, true,
                             "P(T_r<=n) <= (8/c) n h(r), c = inf ET h"};
    BoundCheckResult l22_rev{"mean_lower_from_early_exit", {}, 0.0, true,
                             "ET_r >= 1/(4C h(r)), C = sup P(T<=n)/(n h)"};
    BoundCheckResult l23_markov{"late_tail_from_mean_upper", {}, 0.0, true,
                                "P(T_r>n) <= c/(n h(r)), c = sup ET h"};
    BoundCheckResult l23_rev{"mean_upper_from_late_tail", {}, 0.0, true,
                             "ET_r <= 6(1+6C^2)/h(r), C = sup n P(T>n) h"};
    BoundCheckResult l23_chain{"late_tail_chain", {}, 0.0, true,
                               "P(T_r>n) <= 72 C^2/(n h(r))^2 for n > 2/h(r)+1"};

    for (double r : r_grid) {
        const Entry& er = data.at(r);
        const Entry& e2r = data.at(2.0 * r);
        const double h = er.f.h;
        const double se_T = est_se(er.est);
        for (std::uint64_t n : n_grid) {
            const auto it = er.tails.find(n);
            const auto it2 = e2r.tails.find(n);
            if (it == er.tails.end()) continue;
            const double nn = static_cast<double>(n);
            const TailRow& tr = it->second;

            {
                BoundPoint pt;
                pt.r = r;
                pt.n = n;
                pt.lhs = tr.p_gt;
                pt.rhs = er.est.mean_T / nn;
                pt.se = std::hypot(wilson_se(tr), se_T / nn);
                markov.add(pt);
            }
            if (it2 != e2r.tails.end()) {
                const TailRow& tr2 = it2->second;
                BoundPoint pt;
                pt.r = r;
                pt.n = n;
                pt.lhs = 1.0 - tr2.p_gt;
                pt.rhs = nn / er.est.mean_T;
                pt.se = std::hypot(wilson_se(tr2),
                                   nn * se_T / (er.est.mean_T * er.est.mean_T));
                doubling.add(pt);

                for (std::uint64_t k : {std::uint64_t{2}, std::uint64_t{3}}) {
                    const auto itk = er.tails.find(k * n);
                    if (itk == er.tails.end()) continue;
                    BoundPoint sp;
                    sp.r = r;
                    sp.n = k * n;
                    sp.lhs = itk->second.p_gt;
                    sp.rhs = std::pow(tr2.p_gt, static_cast<double>(k));
                    const double drhs = static_cast<double>(k) *
                                        std::pow(tr2.p_gt, static_cast<double>(k - 1)) *
                                        wilson_se(tr2);
                    sp.se = std::hypot(wilson_se(itk->second), drhs);
                    submult.add(sp);
                }
            }
            {
                BoundPoint pt;
                pt.r = r;
                pt.n = n;
                pt.lhs = 1.0 - tr.p_gt;
                pt.rhs = 8.0 / rep.c_low * nn * h;
                pt.se = wilson_se(tr);
                l22_fwd.add(pt);
            }
            {
                BoundPoint pt;
                pt.r = r;
                pt.n = n;
                pt.lhs = tr.p_gt;
                pt.rhs = rep.c_up / (nn * h);
                pt.se = wilson_se(tr);
                l23_markov.add(pt);
            }
        }
        // The summation-step display applies past n = 2/h(r) + 1; scan the
        // whole tail table since that threshold usually exceeds the n grid.
        for (const auto& t : er.est.tail) {
            if (static_cast<double>(t.n) <= 2.0 / h + 1.0) continue;
            BoundPoint pt;
            pt.r = r;
            pt.n = t.n;
            pt.lhs = t.p_gt;
            pt.rhs = 72.0 * rep.c_tail * rep.c_tail /
                     (static_cast<double>(t.n) * static_cast<double>(t.n) * h * h);
            pt.se = wilson_se(t);
            l23_chain.add(pt);
        }
        {
            // Stated as ET >= 1/(4Ch); in lhs <= rhs form the bound is the lhs.
            BoundPoint pt;
            pt.r = r;
            pt.lhs = 1.0 / (4.0 * rep.c_doubling * h);
            pt.rhs = er.est.mean_T;
            pt.se = se_T;
            l22_rev.add(pt);
        }
        {
            BoundPoint pt;
            pt.r = r;
            pt.lhs = er.est.mean_T;
            pt.rhs = 6.0 * (1.0 + 6.0 * rep.c_tail * rep.c_tail) / h;
            pt.se = se_T;
            l23_rev.add(pt);
        }
    }

    rep.checks = {std::move(markov),   std::move(doubling), std::move(submult),
                  std::move(l22_fwd),  std::move(l22_rev),  std::move(l23_markov),
                  std::move(l23_rev),  std::move(l23_chain)};
    for (const auto& c : rep.checks) {
        if (!c.pass) rep.pass = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// de Acosta inequality
// ---------------------------------------------------------------------------

BoundCheckResult run_de_acosta_check(const StepDistribution& dist,
                                     std::span<const std::uint64_t> n_grid, std::uint64_t paths,
                                     std::uint64_t seed) {
    const auto moments = dist.analytic_moments();
    if (!moments.sq_norm) {
        throw std::invalid_argument("run_de_acosta_check: requires analytic E||X||^2");
    }
    BoundCheckResult check{"de_acosta_var_bound", {}, 0.0, true, "Var(||S_n||) <= 4 n E||X||^2"};
    const auto stats = sn_statistics(dist, n_grid, paths, seed);
    for (const auto& s : stats) {
        BoundPoint pt;
        pt.n = s.n;
        pt.lhs = s.var_norm;
        pt.rhs = 4.0 * static_cast<double>(s.n) * (*moments.sq_norm);
        pt.se = s.var_norm_se;
        check.add(pt);
    }
    return check;
}

}  // namespace pruitt

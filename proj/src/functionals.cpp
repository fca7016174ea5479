#include "pruitt/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pruitt/parallel.hpp"
#include "pruitt/stats.hpp"

namespace pruitt {
namespace {

constexpr double kSlack = 1e-9;

void validate(const PruittFunctionals& f) {
    if (f.G < -kSlack || f.G > 1.0 + kSlack) throw std::logic_error("functionals: G outside [0,1]");
    if (f.K < -kSlack) throw std::logic_error("functionals: negative K");
    if (f.M_norm > 1.0 + kSlack + f.ci_M) throw std::logic_error("functionals: ||M|| > 1");
    if (f.h > 2.0 + kSlack + f.ci_h) throw std::logic_error("functionals: h > 2");
}

}  // namespace

PruittFunctionals functionals_analytic(const StepDistribution& dist, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("functionals_analytic: r must be positive");
    const auto law = dist.norm_law();
    if (!law) {
        throw std::runtime_error("functionals_analytic: no closed-form norm law for variant '" +
                                 dist.variant_name() + "'; use functionals_mc");
    }
    PruittFunctionals f;
    f.r = r;
    f.G = law->tail_prob(r);
    f.K = law->truncated_sq(r) / (r * r);
    f.source = FunctionalsSource::Analytic;
    if (dist.symmetric()) {
        f.M.assign(static_cast<std::size_t>(dist.space().d), 0.0);
        f.M_norm = 0.0;
    } else {
        const auto atoms = dist.atom_law();
        if (!atoms) {
            throw std::runtime_error(
                "functionals_analytic: non-symmetric variant without an atom law; use "
                "functionals_mc");
        }
        Vector m(static_cast<std::size_t>(dist.space().d), 0.0);
        for (const auto& a : atoms->atoms) {
            if (lp_norm(a.x, dist.space()) <= r) {
                for (std::size_t j = 0; j < m.size(); ++j) m[j] += a.prob * a.x[j];
            }
        }
        for (double& c : m) c /= r;
        f.M_norm = lp_norm(m, dist.space());
        f.M = std::move(m);
    }
    f.h = f.G + f.K + f.M_norm;
    validate(f);
    return f;
}

PruittFunctionals functionals_mc(const StepDistribution& dist, double r, std::uint64_t n,
                                 std::uint64_t seed, std::uint64_t stream_base) {
    if (!(r > 0.0)) throw std::invalid_argument("functionals_mc: r must be positive");
    if (n < 1000) throw std::invalid_argument("functionals_mc: need at least 1e3 samples");
    const auto d = static_cast<std::size_t>(dist.space().d);

    struct BlockAcc {
        MomentAcc g;    // indicator ||X|| > r
        MomentAcc k;    // ||X||^2 I(||X|| <= r) / r^2
        MomentAcc gk;   // summed per-sample statistic (common random numbers)
        VectorMomentAcc m{0};
    };
    constexpr std::uint64_t kBlock = 1u << 14;
    const std::uint64_t blocks = block_count(n, kBlock);
    std::vector<BlockAcc> partials(blocks);
    for (auto& b : partials) b.m = VectorMomentAcc(d);

    parallel_blocks(n, kBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        auto& acc = partials[b];
        Vector scaled(d);
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(seed, stream_base + i);
            const Vector x = dist.sample(rng);
            const double norm = lp_norm(x, dist.space());
            const bool above = norm > r;
            const double g_stat = above ? 1.0 : 0.0;
            const double k_stat = above ? 0.0 : norm * norm / (r * r);
            acc.g.add(g_stat);
            acc.k.add(k_stat);
            acc.gk.add(g_stat + k_stat);
            for (std::size_t j = 0; j < d; ++j) scaled[j] = above ? 0.0 : x[j] / r;
            acc.m.add(scaled);
        }
    });

    MomentAcc g_all, k_all, gk_all;
    VectorMomentAcc m_all(d);
    {
        std::vector<MomentAcc> gs, ks, gks;
        for (const auto& b : partials) {
            gs.push_back(b.g);
            ks.push_back(b.k);
            gks.push_back(b.gk);
            m_all.merge(b.m);
        }
        g_all = merge_pairwise(gs);
        k_all = merge_pairwise(ks);
        gk_all = merge_pairwise(gks);
    }

    PruittFunctionals f;
    f.r = r;
    f.source = FunctionalsSource::MonteCarlo;
    f.samples = n;
    f.G = g_all.mean;
    f.K = k_all.mean;
    f.M = m_all.mean;
    f.M_norm = lp_norm(f.M, dist.space());
    f.h = f.G + f.K + f.M_norm;
    f.ci_G = 1.96 * g_all.sem();
    f.ci_K = 1.96 * k_all.sem();
    // Norm-of-mean interval: the l^p norm of the per-coordinate standard
    // errors bounds |  ||M-hat|| - ||M||  | <= ||M-hat - M|| in distribution.
    Vector coord_se(d);
    for (std::size_t j = 0; j < d; ++j) {
        coord_se[j] = std::sqrt(m_all.coord_variance(j) / static_cast<double>(n));
    }
    f.ci_M = 1.96 * lp_norm(coord_se, dist.space());
    f.ci_h = 1.96 * gk_all.sem() + f.ci_M;
    validate(f);
    return f;
}

bool has_analytic_functionals(const StepDistribution& dist) {
    if (!dist.norm_law()) return false;
    return dist.symmetric() || dist.atom_law().has_value();
}

PruittFunctionals functionals_auto(const StepDistribution& dist, double r, std::uint64_t mc_samples,
                                   std::uint64_t seed, std::uint64_t stream_base) {
    if (has_analytic_functionals(dist)) return functionals_analytic(dist, r);
    return functionals_mc(dist, r, mc_samples, seed, stream_base);
}

Q2Report check_q2_identity(const StepDistribution& dist, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("check_q2_identity: r must be positive");
    const auto law = dist.norm_law();
    if (!law) {
        throw std::runtime_error("check_q2_identity: no closed-form norm law; use the MC variant");
    }
    // G is a right-continuous step function of u; the integral is an exact
    // finite sum over its jump points.
    double integral = 0.0;
    double prev = 0.0;
    for (const auto& atom : law->atoms) {
        if (prev >= r) break;
        const double seg_end = std::min(atom.radius, r);
        if (seg_end > prev) {
            integral += law->tail_prob(prev) * (seg_end * seg_end - prev * prev);
            prev = seg_end;
        }
    }
    if (prev < r) integral += law->tail_prob(prev) * (r * r - prev * prev);

    Q2Report rep;
    rep.r = r;
    rep.direct = law->tail_prob(r) + law->truncated_sq(r) / (r * r);
    rep.integral_form = integral / (r * r);
    rep.residual = std::fabs(rep.direct - rep.integral_form);
    rep.analytic = true;
    rep.tol = 0.0;
    return rep;
}

Q2Report check_q2_identity_mc(const StepDistribution& dist, double r, std::uint64_t n,
                              std::uint64_t seed, double tol) {
    if (!(r > 0.0)) throw std::invalid_argument("check_q2_identity_mc: r must be positive");
    if (n < 1000) throw std::invalid_argument("check_q2_identity_mc: need at least 1e3 samples");
    std::vector<double> norms(n);
    constexpr std::uint64_t kBlock = 1u << 14;
    parallel_blocks(n, kBlock, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(seed, stream_salt::kFunctionals + i);
            norms[i] = lp_norm(dist.sample(rng), dist.space());
        }
    });
    std::sort(norms.begin(), norms.end());
    const double nn = static_cast<double>(n);
    const auto tail = [&](double u) {
        const auto it = std::upper_bound(norms.begin(), norms.end(), u);
        return static_cast<double>(norms.end() - it) / nn;
    };

    double trunc_sq = 0.0;
    for (double v : norms) {
        if (v <= r) trunc_sq += v * v;
    }

    Q2Report rep;
    rep.r = r;
    rep.direct = tail(r) + trunc_sq / (nn * r * r);
    const double integral =
        adaptive_simpson([&](double u) { return 2.0 * u * tail(u); }, 0.0, r, tol * r * r * 0.1);
    rep.integral_form = integral / (r * r);
    rep.residual = std::fabs(rep.direct - rep.integral_form);
    rep.analytic = false;
    rep.tol = tol;
    return rep;
}

HdCheck check_hd_bounds(const PruittFunctionals& f_r, const PruittFunctionals& f_s) {
    if (!(f_r.r <= f_s.r)) throw std::invalid_argument("check_hd_bounds: need r <= s");
    HdCheck c;
    c.r = f_r.r;
    c.s = f_s.r;
    c.lower = (f_r.r * f_r.r) / (2.0 * f_s.r * f_s.r);
    c.upper = 2.0;
    c.ratio = f_s.h / f_r.h;
    c.margin_lower = c.ratio - c.lower;
    c.margin_upper = c.upper - c.ratio;
    // Declare failure only beyond the CI-inflated envelope.
    const double hi_num = f_s.h + f_s.ci_h;
    const double lo_num = std::max(0.0, f_s.h - f_s.ci_h);
    const double hi_den = f_r.h + f_r.ci_h;
    const double lo_den = std::max(1e-300, f_r.h - f_r.ci_h);
    const double ratio_max = hi_num / lo_den;
    const double ratio_min = lo_num / hi_den;
    c.pass = ratio_max >= c.lower * (1.0 - kSlack) && ratio_min <= c.upper * (1.0 + kSlack);
    return c;
}

HLimitReport check_h_limit(const StepDistribution& dist, std::span<const double> r_grid,
                           std::uint64_t mc_samples, std::uint64_t seed) {
    if (!dist.symmetric()) {
        throw std::invalid_argument("check_h_limit: requires a centered (symmetric) distribution");
    }
    const auto moments = dist.analytic_moments();
    if (!moments.sq_norm) {
        throw std::invalid_argument("check_h_limit: requires an analytic E||X||^2 provider");
    }
    HLimitReport rep;
    rep.sq_norm = *moments.sq_norm;
    std::uint64_t job = 0;
    for (double r : r_grid) {
        const auto f = functionals_auto(dist, r, mc_samples, seed,
                                        stream_salt::kFunctionals + stream_salt::job_offset(job++));
        rep.rows.push_back({r, r * r * f.h / rep.sq_norm});
    }
    rep.terminal_gap = rep.rows.empty() ? 0.0 : std::fabs(rep.rows.back().ratio - 1.0);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        if (std::fabs(rep.rows[i].ratio - 1.0) > std::fabs(rep.rows[i - 1].ratio - 1.0) + kSlack) {
            rep.monotone_approach = false;
        }
    }
    return rep;
}

QxReport truncated_moment_identity(const StepDistribution& dist, double r, std::uint64_t n,
                                   std::uint64_t seed) {
    if (!(r > 0.0)) throw std::invalid_argument("truncated_moment_identity: r must be positive");
    constexpr std::uint64_t kBlock = 1u << 14;
    const std::uint64_t blocks = block_count(n, kBlock);
    std::vector<MomentAcc> partials(blocks);
    parallel_blocks(n, kBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        auto& acc = partials[b];
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(seed, stream_salt::kTruncatedMoment + i);
            const Vector x = dist.sample(rng);
            const double norm = lp_norm(truncate_step(x, r, dist.space()), dist.space());
            acc.add(norm * norm);
        }
    });
    const MomentAcc all = merge_pairwise(partials);

    const PruittFunctionals f3r = functionals_auto(dist, 3.0 * r, n, seed);
    QxReport rep;
    rep.r = r;
    rep.mc_estimate = all.mean;
    rep.mc_se = all.sem();
    rep.reference = 9.0 * r * r * (f3r.G + f3r.K);
    rep.reference_se = 9.0 * r * r * (f3r.ci_G + f3r.ci_K) / 1.96;
    rep.residual = std::fabs(rep.mc_estimate - rep.reference);
    rep.combined_se = std::sqrt(rep.mc_se * rep.mc_se + rep.reference_se * rep.reference_se);
    rep.within_ci =
        rep.residual <= 3.0 * rep.combined_se + 1e-9 * std::max(1.0, std::fabs(rep.reference));
    return rep;
}

}  // namespace pruitt

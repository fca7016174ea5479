#include "pruitt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pruitt/functionals.hpp"
#include "pruitt/kernels.hpp"
#include "pruitt/parallel.hpp"
#include "pruitt/stats.hpp"

namespace pruitt {
namespace {

// Matches the kernels' |x|^p so delta updates and recomputes agree.
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

// Exit-time walker. Maintains sum_j |S_j|^p incrementally for sparse steps
// (exact recompute every 2^16 sparse steps bounds drift, and every exit
// trigger is confirmed against an exact recompute); dense steps recompute
// exactly every step.
class Walker {
public:
    Walker(const StepDistribution& dist, double r, bool truncated)
        : dist_(dist),
          p_(dist.space().p),
          d_(static_cast<std::size_t>(dist.space().d)),
          r_pow_(std::pow(r, dist.space().p)),
          cutoff_(3.0 * r),
          cutoff_pow_(std::pow(3.0 * r, dist.space().p)),
          truncated_(truncated),
          s_(d_, 0.0) {}

    template <typename OnStep>
    ExitSample run(std::uint64_t cap, RngStream& rng, OnStep&& on_step) {
        s_.assign(d_, 0.0);
        pow_sum_ = 0.0;
        std::uint64_t since_recompute = 0;
        for (std::uint64_t n = 1; n <= cap; ++n) {
            dist_.sample_into(buf_, rng);
            if (truncated_) clip_step();
            bool exact = false;
            if (buf_.dense) {
                kernels::add_assign(s_.data(), buf_.dense_step.data(), d_);
                pow_sum_ = kernels::sum_abs_pow(s_.data(), d_, p_);
                exact = true;
            } else {
                for (const auto& [j, v] : buf_.sparse) {
                    double& coord = s_[static_cast<std::size_t>(j)];
                    const double updated = coord + v;
                    pow_sum_ += pow_abs(updated, p_) - pow_abs(coord, p_);
                    coord = updated;
                }
                if ((++since_recompute & 0xFFFFu) == 0u) {
                    pow_sum_ = kernels::sum_abs_pow(s_.data(), d_, p_);
                }
            }
            bool exited = false;
            if (pow_sum_ > r_pow_) {
                if (!exact) {
                    // Confirm on an exact recompute before declaring the exit.
                    pow_sum_ = kernels::sum_abs_pow(s_.data(), d_, p_);
                }
                exited = pow_sum_ > r_pow_;
            }
            on_step(n, static_cast<const Vector&>(s_), exited);
            if (exited) return {true, n};
        }
        return {false, cap};
    }

private:
    void clip_step() {
        if (buf_.dense) {
            const double norm = lp_norm(buf_.dense_step.data(), d_, p_);
            if (norm > cutoff_) {
                const double scale = cutoff_ / norm * (1.0 - 1e-12);
                for (double& c : buf_.dense_step) c *= scale;
            }
            return;
        }
        double sum = 0.0;
        for (const auto& [j, v] : buf_.sparse) sum += pow_abs(v, p_);
        if (sum > cutoff_pow_) {
            const double norm = std::pow(sum, 1.0 / p_);
            const double scale = cutoff_ / norm * (1.0 - 1e-12);
            for (auto& [j, v] : buf_.sparse) v *= scale;
        }
    }

    const StepDistribution& dist_;
    double p_;
    std::size_t d_;
    double r_pow_;
    double cutoff_;
    double cutoff_pow_;
    bool truncated_;
    Vector s_;
    double pow_sum_ = 0.0;
    StepBuffer buf_;
};

struct NoObserver {
    void operator()(std::uint64_t, const Vector&, bool) const {}
};

}  // namespace

ExitSample simulate_exit(const StepDistribution& dist, double r, std::uint64_t cap,
                         RngStream& rng) {
    if (!(r > 0.0)) throw std::invalid_argument("simulate_exit: r must be positive");
    if (cap < 1) throw std::invalid_argument("simulate_exit: cap must be >= 1");
    Walker w(dist, r, false);
    return w.run(cap, rng, NoObserver{});
}

ExitSample simulate_exit_truncated(const StepDistribution& dist, double r, std::uint64_t cap,
                                   RngStream& rng) {
    if (!(r > 0.0)) throw std::invalid_argument("simulate_exit_truncated: r must be positive");
    if (cap < 1) throw std::invalid_argument("simulate_exit_truncated: cap must be >= 1");
    Walker w(dist, r, true);
    return w.run(cap, rng, NoObserver{});
}

ExitSample simulate_exit_observed(
    const StepDistribution& dist, double r, std::uint64_t cap, RngStream& rng,
    const std::function<void(std::uint64_t, const Vector&, bool)>& on_step) {
    if (!(r > 0.0)) throw std::invalid_argument("simulate_exit_observed: r must be positive");
    if (cap < 1) throw std::invalid_argument("simulate_exit_observed: cap must be >= 1");
    Walker w(dist, r, false);
    return w.run(cap, rng, [&](std::uint64_t n, const Vector& s, bool exited) {
        on_step(n, s, exited);
    });
}

std::uint64_t default_cap(const StepDistribution& dist, double r, double multiplier,
                          std::uint64_t mc_samples, std::uint64_t seed) {
    if (!(multiplier > 0.0)) throw std::invalid_argument("default_cap: multiplier must be positive");
    const PruittFunctionals f = functionals_auto(dist, r, mc_samples, seed);
    if (!(f.h > 0.0)) {
        throw std::runtime_error("default_cap: estimated h(r) is zero; walk may never exit");
    }
    const double raw = std::ceil(multiplier / f.h);
    constexpr double kMax = 1e12;
    return static_cast<std::uint64_t>(std::min(raw, kMax));
}

ExitTimeEstimate estimate_exit_time(const StepDistribution& dist, double r, std::uint64_t paths,
                                    std::uint64_t cap, std::uint64_t seed,
                                    std::uint64_t stream_base,
                                    std::span<const std::uint64_t> extra_tail_n) {
    if (paths < 100) throw std::invalid_argument("estimate_exit_time: need at least 100 paths");
    if (cap < 1) throw std::invalid_argument("estimate_exit_time: cap must be >= 1");

    std::vector<std::uint64_t> exit_times(paths, 0);  // 0 marks a censored path
    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t blocks = block_count(paths, kBlock);
    std::vector<MomentAcc> block_moments(blocks);
    std::vector<std::uint64_t> block_censored(blocks, 0);

    parallel_blocks(paths, kBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        Walker w(dist, r, false);
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(seed, stream_base + i);
            const ExitSample s = w.run(cap, rng, NoObserver{});
            if (s.exited) {
                exit_times[i] = s.n;
                block_moments[b].add(static_cast<double>(s.n));
            } else {
                ++block_censored[b];
            }
        }
    });

    ExitTimeEstimate est;
    est.r = r;
    est.paths = paths;
    est.cap = cap;
    est.seed = seed;
    est.stream_base = stream_base;
    const MomentAcc all = merge_pairwise(block_moments);
    est.exited = all.n;
    for (std::uint64_t c : block_censored) est.censored += c;
    est.mean_T = all.mean;
    est.var_T = all.variance();
    est.ci_halfwidth = 1.96 * all.sem();
    est.lower_bound_only = est.censored > 0;
    est.unreliable = est.censored * 100 > paths;

    // Tail grid: powers of two up to the cap, the quantile-scale points
    // {0.5, 1, 2, 4} x mean_T, and any caller-requested rows.
    std::vector<std::uint64_t> grid;
    for (std::uint64_t n = 1; n <= cap; n *= 2) {
        grid.push_back(n);
        if (n > cap / 2) break;
    }
    for (double q : {0.5, 1.0, 2.0, 4.0}) {
        const double v = std::round(q * est.mean_T);
        if (v >= 1.0 && v <= static_cast<double>(cap)) {
            grid.push_back(static_cast<std::uint64_t>(v));
        }
    }
    for (std::uint64_t n : extra_tail_n) {
        if (n >= 1 && n <= cap) grid.push_back(n);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // Censored paths exceeded the cap, so T > n holds for every n <= cap.
    std::vector<std::uint64_t> effective(exit_times);
    for (auto& t : effective) {
        if (t == 0) t = cap + 1;
    }
    std::sort(effective.begin(), effective.end());
    est.tail.reserve(grid.size());
    for (std::uint64_t n : grid) {
        const auto it = std::upper_bound(effective.begin(), effective.end(), n);
        const auto above = static_cast<std::uint64_t>(effective.end() - it);
        const WilsonInterval ci = wilson_interval(above, paths);
        est.tail.push_back(
            {n, static_cast<double>(above) / static_cast<double>(paths), ci.lo, ci.hi});
    }
    return est;
}

PairedTruncationReport exit_equals_truncated_exit(const StepDistribution& dist, double r,
                                                  std::uint64_t paths, std::uint64_t cap,
                                                  std::uint64_t seed, std::uint64_t stream_base) {
    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t blocks = block_count(paths, kBlock);
    std::vector<std::uint64_t> block_mismatch(blocks, 0);
    std::vector<std::int64_t> block_first(blocks, -1);

    parallel_blocks(paths, kBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        Walker raw(dist, r, false);
        Walker clipped(dist, r, true);
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng_raw(seed, stream_base + i);
            RngStream rng_hat(seed, stream_base + i);
            const ExitSample a = raw.run(cap, rng_raw, NoObserver{});
            const ExitSample h = clipped.run(cap, rng_hat, NoObserver{});
            if (!(a == h)) {
                ++block_mismatch[b];
                if (block_first[b] < 0) block_first[b] = static_cast<std::int64_t>(i);
            }
        }
    });

    PairedTruncationReport rep;
    rep.paths = paths;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        rep.mismatches += block_mismatch[b];
        if (rep.first_mismatch_path < 0 && block_first[b] >= 0) {
            rep.first_mismatch_path = block_first[b];
        }
    }
    return rep;
}

std::vector<SnStats> sn_statistics(const StepDistribution& dist,
                                   std::span<const std::uint64_t> n_grid, std::uint64_t paths,
                                   std::uint64_t seed, std::uint64_t stream_base) {
    if (n_grid.empty()) return {};
    if (!std::is_sorted(n_grid.begin(), n_grid.end())) {
        throw std::invalid_argument("sn_statistics: n grid must be sorted ascending");
    }
    if (n_grid.front() < 1) throw std::invalid_argument("sn_statistics: n must be >= 1");
    const auto d = static_cast<std::size_t>(dist.space().d);
    const double p = dist.space().p;
    const std::uint64_t max_n = n_grid.back();

    struct BlockAcc {
        std::vector<MomentAcc> norm;
        std::vector<MomentAcc> norm_sq;
    };
    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t blocks = block_count(paths, kBlock);
    std::vector<BlockAcc> partials(blocks);
    for (auto& b : partials) {
        b.norm.resize(n_grid.size());
        b.norm_sq.resize(n_grid.size());
    }

    parallel_blocks(paths, kBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        auto& acc = partials[b];
        Vector s(d);
        StepBuffer buf;
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(seed, stream_base + i);
            s.assign(d, 0.0);
            std::size_t next_grid = 0;
            for (std::uint64_t n = 1; n <= max_n; ++n) {
                dist.sample_into(buf, rng);
                if (buf.dense) {
                    kernels::add_assign(s.data(), buf.dense_step.data(), d);
                } else {
                    for (const auto& [j, v] : buf.sparse) s[static_cast<std::size_t>(j)] += v;
                }
                if (next_grid < n_grid.size() && n == n_grid[next_grid]) {
                    const double norm = std::pow(kernels::sum_abs_pow(s.data(), d, p), 1.0 / p);
                    acc.norm[next_grid].add(norm);
                    acc.norm_sq[next_grid].add(norm * norm);
                    ++next_grid;
                }
            }
        }
    });

    std::vector<SnStats> out(n_grid.size());
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        std::vector<MomentAcc> norms, sqs;
        norms.reserve(blocks);
        sqs.reserve(blocks);
        for (const auto& b : partials) {
            norms.push_back(b.norm[g]);
            sqs.push_back(b.norm_sq[g]);
        }
        const MomentAcc norm_all = merge_pairwise(norms);
        const MomentAcc sq_all = merge_pairwise(sqs);
        SnStats row;
        row.n = n_grid[g];
        row.mean_norm = norm_all.mean;
        row.ci_mean_norm = 1.96 * norm_all.sem();
        row.mean_sq = sq_all.mean;
        row.ci_mean_sq = 1.96 * sq_all.sem();
        row.var_norm = norm_all.variance();
        row.var_norm_se = norm_all.variance_se();
        out[g] = row;
    }
    return out;
}

}  // namespace pruitt

#include "pruitt/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pruitt/kernels.hpp"
#include "pruitt/parallel.hpp"
#include "pruitt/stats.hpp"
#include "pruitt/streams.hpp"

namespace pruitt {
namespace {

constexpr double kProbTol = 1e-12;
// Largest atom-law size we are willing to enumerate.
constexpr std::size_t kMaxAtoms = 1u << 14;

void require_finite_nonneg(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0) {
            throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
        }
    }
}

bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

NormLaw consolidate(std::vector<NormLaw::Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.radius < b.radius; });
    NormLaw law;
    for (const auto& a : atoms) {
        if (!law.atoms.empty() && law.atoms.back().radius == a.radius) {
            law.atoms.back().prob += a.prob;
        } else {
            law.atoms.push_back(a);
        }
    }
    return law;
}

double pow_abs(double x, double p) {
    if (p == 2.0) return x * x;
    return std::pow(std::fabs(x), p);
}

}  // namespace

double NormLaw::tail_prob(double r) const {
    double acc = 0.0;
    for (const auto& a : atoms) {
        if (a.radius > r) acc += a.prob;
    }
    return acc;
}

double NormLaw::truncated_sq(double r) const {
    double acc = 0.0;
    for (const auto& a : atoms) {
        if (a.radius <= r) acc += a.prob * a.radius * a.radius;
    }
    return acc;
}

double NormLaw::moment(double q) const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.prob * std::pow(a.radius, q);
    return acc;
}

double NormLaw::mass_at_zero() const {
    double acc = 0.0;
    for (const auto& a : atoms) {
        if (a.radius == 0.0) acc += a.prob;
    }
    return acc;
}

double NormLaw::min_positive_radius() const {
    for (const auto& a : atoms) {
        if (a.radius > 0.0) return a.radius;
    }
    return std::numeric_limits<double>::infinity();
}

double NormLaw::max_radius() const { return atoms.empty() ? 0.0 : atoms.back().radius; }

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

StepDistribution StepDistribution::fixed_subset_rademacher(SpaceSpec space, std::vector<int> subset,
                                                           std::vector<double> alpha) {
    if (subset.empty()) throw std::invalid_argument("fixed_subset_rademacher: empty subset");
    if (subset.size() != alpha.size()) {
        throw std::invalid_argument("fixed_subset_rademacher: subset/alpha size mismatch");
    }
    require_finite_nonneg(alpha, "fixed_subset_rademacher: weights");
    std::vector<int> sorted = subset;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("fixed_subset_rademacher: duplicate subset index");
    }
    for (int j : subset) {
        if (j < 0 || j >= space.d) {
            throw std::invalid_argument("fixed_subset_rademacher: subset index out of range");
        }
    }
    if (all_zero(alpha)) {
        throw std::invalid_argument("fixed_subset_rademacher: step is almost surely zero");
    }
    return StepDistribution(space,
                            detail::FixedSubsetRademacher{std::move(subset), std::move(alpha)});
}

StepDistribution StepDistribution::random_subset_rademacher(SpaceSpec space, int k,
                                                            std::vector<double> alpha) {
    if (k < 1 || k > space.d) {
        throw std::invalid_argument("random_subset_rademacher: need 1 <= k <= d");
    }
    if (alpha.size() != static_cast<std::size_t>(space.d)) {
        throw std::invalid_argument("random_subset_rademacher: alpha must have d entries");
    }
    require_finite_nonneg(alpha, "random_subset_rademacher: weights");
    if (all_zero(alpha)) {
        throw std::invalid_argument("random_subset_rademacher: step is almost surely zero");
    }
    const bool uniform =
        std::all_of(alpha.begin(), alpha.end(), [&](double a) { return a == alpha.front(); });
    return StepDistribution(space, detail::RandomSubsetRademacher{k, std::move(alpha), uniform});
}

StepDistribution StepDistribution::gaussian_steps(SpaceSpec space, std::vector<double> sigma) {
    if (sigma.size() != static_cast<std::size_t>(space.d)) {
        throw std::invalid_argument("gaussian_steps: sigma must have d entries");
    }
    require_finite_nonneg(sigma, "gaussian_steps: std devs");
    if (all_zero(sigma)) throw std::invalid_argument("gaussian_steps: step is almost surely zero");
    return StepDistribution(space, detail::GaussianSteps{std::move(sigma)});
}

StepDistribution StepDistribution::discrete_radial(SpaceSpec space, std::vector<double> radii,
                                                   std::vector<double> probs, AxisMode mode) {
    if (radii.empty() || radii.size() != probs.size()) {
        throw std::invalid_argument("discrete_radial: radii/probs must be nonempty and matched");
    }
    for (double r : radii) {
        if (!std::isfinite(r) || r <= 0.0) {
            throw std::invalid_argument("discrete_radial: radii must be finite and positive");
        }
    }
    require_finite_nonneg(probs, "discrete_radial: probabilities");
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::fabs(total - 1.0) > kProbTol) {
        throw std::invalid_argument("discrete_radial: probabilities must sum to 1");
    }
    detail::DiscreteRadial dr{std::move(radii), std::move(probs), mode, {}};
    dr.cum.resize(dr.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dr.probs.size(); ++i) {
        acc += dr.probs[i];
        dr.cum[i] = acc;
    }
    dr.cum.back() = 1.0;
    return StepDistribution(space, std::move(dr));
}

StepDistribution StepDistribution::point_mass(SpaceSpec space, Vector x) {
    if (x.size() != static_cast<std::size_t>(space.d)) {
        throw std::invalid_argument("point_mass: vector must have d entries");
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("point_mass: non-finite coordinate");
    }
    if (all_zero(x)) throw std::invalid_argument("point_mass: step is almost surely zero");
    return StepDistribution(space, detail::PointMass{std::move(x)});
}

StepDistribution StepDistribution::type_witness(SpaceSpec space, std::vector<Vector> vectors) {
    if (vectors.empty()) throw std::invalid_argument("type_witness: need at least one vector");
    bool any_nonzero = false;
    for (const auto& v : vectors) {
        if (v.size() != static_cast<std::size_t>(space.d)) {
            throw std::invalid_argument("type_witness: vector dimension mismatch");
        }
        for (double c : v) {
            if (!std::isfinite(c)) throw std::invalid_argument("type_witness: non-finite coordinate");
            if (c != 0.0) any_nonzero = true;
        }
    }
    if (!any_nonzero) throw std::invalid_argument("type_witness: step is almost surely zero");
    detail::TypeWitness tw{std::move(vectors), {}};
    const double root_n = std::sqrt(static_cast<double>(tw.vectors.size()));
    tw.scaled.reserve(tw.vectors.size());
    for (const auto& v : tw.vectors) {
        Vector s = v;
        for (double& c : s) c *= root_n;
        tw.scaled.push_back(std::move(s));
    }
    return StepDistribution(space, std::move(tw));
}

StepDistribution StepDistribution::shifted(StepDistribution base, Vector shift) {
    const SpaceSpec space = base.space();
    if (shift.size() != static_cast<std::size_t>(space.d)) {
        throw std::invalid_argument("shifted: shift must have d entries");
    }
    for (double v : shift) {
        if (!std::isfinite(v)) throw std::invalid_argument("shifted: non-finite shift coordinate");
    }
    auto base_ptr = std::make_shared<const StepDistribution>(std::move(base));
    return StepDistribution(space, detail::Shifted{std::move(base_ptr), std::move(shift)});
}

// ---------------------------------------------------------------------------
// Introspection
// ---------------------------------------------------------------------------

std::string StepDistribution::variant_name() const {
    struct Visitor {
        std::string operator()(const detail::FixedSubsetRademacher&) const {
            return "fixed_subset_rademacher";
        }
        std::string operator()(const detail::RandomSubsetRademacher&) const {
            return "random_subset_rademacher";
        }
        std::string operator()(const detail::GaussianSteps&) const { return "gaussian_steps"; }
        std::string operator()(const detail::DiscreteRadial&) const { return "discrete_radial"; }
        std::string operator()(const detail::PointMass&) const { return "point_mass"; }
        std::string operator()(const detail::TypeWitness&) const { return "type_witness"; }
        std::string operator()(const detail::Shifted&) const { return "shifted"; }
    };
    return std::visit(Visitor{}, data_);
}

bool StepDistribution::symmetric() const {
    if (std::holds_alternative<detail::PointMass>(data_)) return false;
    if (const auto* sh = std::get_if<detail::Shifted>(&data_)) {
        return all_zero(sh->shift) && sh->base->symmetric();
    }
    return true;
}

bool StepDistribution::degenerate() const {
    if (std::holds_alternative<detail::PointMass>(data_)) return true;
    if (const auto* sh = std::get_if<detail::Shifted>(&data_)) return sh->base->degenerate();
    return false;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

void StepDistribution::sample_into(StepBuffer& buf, RngStream& rng) const {
    const auto d = static_cast<std::size_t>(space_.d);
    struct Visitor {
        StepBuffer& buf;
        RngStream& rng;
        std::size_t d;

        void operator()(const detail::FixedSubsetRademacher& fs) const {
            buf.dense = false;
            buf.sparse.clear();
            for (std::size_t i = 0; i < fs.subset.size(); ++i) {
                buf.sparse.emplace_back(fs.subset[i], fs.alpha[i] * rng.next_sign());
            }
        }

        void operator()(const detail::RandomSubsetRademacher& rs) const {
            buf.dense = false;
            buf.sparse.clear();
            if (buf.fy_perm.size() != d) {
                buf.fy_perm.resize(d);
                std::iota(buf.fy_perm.begin(), buf.fy_perm.end(), 0);
            }
            const auto k = static_cast<std::size_t>(rs.k);
            buf.fy_swaps.clear();
            for (std::size_t i = 0; i < k; ++i) {
                const auto j = i + static_cast<std::size_t>(rng.next_below(d - i));
                std::swap(buf.fy_perm[i], buf.fy_perm[j]);
                buf.fy_swaps.push_back(static_cast<int>(j));
            }
            for (std::size_t i = 0; i < k; ++i) {
                const int coord = buf.fy_perm[i];
                buf.sparse.emplace_back(coord, rs.alpha[static_cast<std::size_t>(coord)] *
                                                   rng.next_sign());
            }
            // Undo the swaps so the permutation is identity again.
            for (std::size_t i = k; i-- > 0;) {
                std::swap(buf.fy_perm[i], buf.fy_perm[static_cast<std::size_t>(buf.fy_swaps[i])]);
            }
        }

        void operator()(const detail::GaussianSteps& gs) const {
            buf.dense = true;
            buf.dense_step.resize(d);
            for (std::size_t j = 0; j < d; ++j) {
                buf.dense_step[j] = gs.sigma[j] * rng.next_gaussian();
            }
        }

        void operator()(const detail::DiscreteRadial& dr) const {
            buf.dense = false;
            buf.sparse.clear();
            const double u = rng.next_unit();
            const auto it = std::upper_bound(dr.cum.begin(), dr.cum.end(), u);
            const auto idx = static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(it - dr.cum.begin(),
                                         static_cast<std::ptrdiff_t>(dr.cum.size()) - 1));
            const int axis = dr.axis_mode == AxisMode::Fixed
                                 ? 0
                                 : static_cast<int>(rng.next_below(d));
            buf.sparse.emplace_back(axis, dr.radii[idx] * rng.next_sign());
        }

        void operator()(const detail::PointMass& pm) const {
            buf.dense = true;
            buf.dense_step = pm.x;
        }

        void operator()(const detail::TypeWitness& tw) const {
            buf.dense = true;
            const auto j = static_cast<std::size_t>(rng.next_below(tw.scaled.size()));
            const double sign = rng.next_sign();
            buf.dense_step.resize(d);
            const Vector& src = tw.scaled[j];
            for (std::size_t c = 0; c < d; ++c) buf.dense_step[c] = sign * src[c];
        }

        void operator()(const detail::Shifted& sh) const {
            sh.base->sample_into(buf, rng);
            if (buf.dense) {
                kernels::add_assign(buf.dense_step.data(), sh.shift.data(), d);
            } else {
                buf.dense_step = sh.shift;
                for (const auto& [j, v] : buf.sparse) {
                    buf.dense_step[static_cast<std::size_t>(j)] += v;
                }
                buf.dense = true;
            }
        }
    };
    std::visit(Visitor{buf, rng, d}, data_);
}

Vector StepDistribution::sample(RngStream& rng) const {
    StepBuffer buf;
    sample_into(buf, rng);
    if (buf.dense) return buf.dense_step;
    Vector x(static_cast<std::size_t>(space_.d), 0.0);
    for (const auto& [j, v] : buf.sparse) x[static_cast<std::size_t>(j)] = v;
    return x;
}

// ---------------------------------------------------------------------------
// Analytic providers
// ---------------------------------------------------------------------------

std::optional<NormLaw> StepDistribution::norm_law() const {
    const double p = space_.p;
    if (const auto* fs = std::get_if<detail::FixedSubsetRademacher>(&data_)) {
        double sum_p = 0.0;
        for (double a : fs->alpha) sum_p += pow_abs(a, p);
        return consolidate({{std::pow(sum_p, 1.0 / p), 1.0}});
    }
    if (const auto* rs = std::get_if<detail::RandomSubsetRademacher>(&data_)) {
        if (!rs->alpha_uniform) return std::nullopt;  // ||X||^p random; MC only
        const double radius =
            rs->alpha.front() * std::pow(static_cast<double>(rs->k), 1.0 / p);
        return consolidate({{radius, 1.0}});
    }
    if (const auto* dr = std::get_if<detail::DiscreteRadial>(&data_)) {
        std::vector<NormLaw::Atom> atoms;
        for (std::size_t i = 0; i < dr->radii.size(); ++i) {
            atoms.push_back({dr->radii[i], dr->probs[i]});
        }
        return consolidate(std::move(atoms));
    }
    if (const auto* pm = std::get_if<detail::PointMass>(&data_)) {
        return consolidate({{lp_norm(pm->x, space_), 1.0}});
    }
    if (const auto* tw = std::get_if<detail::TypeWitness>(&data_)) {
        std::vector<NormLaw::Atom> atoms;
        const double prob = 1.0 / static_cast<double>(tw->scaled.size());
        for (const auto& v : tw->scaled) atoms.push_back({lp_norm(v, space_), prob});
        return consolidate(std::move(atoms));
    }
    if (std::holds_alternative<detail::Shifted>(data_)) {
        const auto atoms = atom_law();
        if (!atoms) return std::nullopt;
        std::vector<NormLaw::Atom> out;
        out.reserve(atoms->atoms.size());
        for (const auto& a : atoms->atoms) out.push_back({lp_norm(a.x, space_), a.prob});
        return consolidate(std::move(out));
    }
    return std::nullopt;
}

std::optional<AtomLaw> StepDistribution::atom_law() const {
    const auto d = static_cast<std::size_t>(space_.d);
    if (const auto* fs = std::get_if<detail::FixedSubsetRademacher>(&data_)) {
        const std::size_t m = fs->subset.size();
        if (m > 14 || (std::size_t{1} << m) > kMaxAtoms) return std::nullopt;
        const std::size_t count = std::size_t{1} << m;
        AtomLaw law;
        law.atoms.reserve(count);
        const double prob = 1.0 / static_cast<double>(count);
        for (std::size_t mask = 0; mask < count; ++mask) {
            Vector x(d, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                const double sign = (mask >> i) & 1u ? 1.0 : -1.0;
                x[static_cast<std::size_t>(fs->subset[i])] = sign * fs->alpha[i];
            }
            law.atoms.push_back({std::move(x), prob});
        }
        return law;
    }
    if (const auto* dr = std::get_if<detail::DiscreteRadial>(&data_)) {
        AtomLaw law;
        const std::size_t axes = dr->axis_mode == AxisMode::Fixed ? 1 : d;
        if (2 * axes * dr->radii.size() > kMaxAtoms) return std::nullopt;
        for (std::size_t i = 0; i < dr->radii.size(); ++i) {
            const double per_axis = dr->probs[i] / static_cast<double>(axes);
            for (std::size_t a = 0; a < axes; ++a) {
                for (double sign : {1.0, -1.0}) {
                    Vector x(d, 0.0);
                    x[a] = sign * dr->radii[i];
                    law.atoms.push_back({std::move(x), 0.5 * per_axis});
                }
            }
        }
        return law;
    }
    if (const auto* pm = std::get_if<detail::PointMass>(&data_)) {
        AtomLaw law;
        law.atoms.push_back({pm->x, 1.0});
        return law;
    }
    if (const auto* tw = std::get_if<detail::TypeWitness>(&data_)) {
        AtomLaw law;
        const double prob = 0.5 / static_cast<double>(tw->scaled.size());
        for (const auto& v : tw->scaled) {
            Vector neg = v;
            for (double& c : neg) c = -c;
            law.atoms.push_back({v, prob});
            law.atoms.push_back({std::move(neg), prob});
        }
        return law;
    }
    if (const auto* sh = std::get_if<detail::Shifted>(&data_)) {
        auto base = sh->base->atom_law();
        if (!base) return std::nullopt;
        for (auto& a : base->atoms) {
            kernels::add_assign(a.x.data(), sh->shift.data(), d);
        }
        return base;
    }
    return std::nullopt;
}

AnalyticMoments StepDistribution::analytic_moments() const {
    const double p = space_.p;
    const auto d = static_cast<std::size_t>(space_.d);
    AnalyticMoments out;

    if (const auto* fs = std::get_if<detail::FixedSubsetRademacher>(&data_)) {
        double sum_p = 0.0;
        std::vector<double> coord_sq(d, 0.0);
        for (std::size_t i = 0; i < fs->subset.size(); ++i) {
            sum_p += pow_abs(fs->alpha[i], p);
            coord_sq[static_cast<std::size_t>(fs->subset[i])] = fs->alpha[i] * fs->alpha[i];
        }
        out.p_norm = sum_p;
        out.sq_norm = std::pow(sum_p, 2.0 / p);
        out.coord_sq = std::move(coord_sq);
        out.mean = Vector(d, 0.0);
        return out;
    }
    if (const auto* rs = std::get_if<detail::RandomSubsetRademacher>(&data_)) {
        const double inclusion = static_cast<double>(rs->k) / static_cast<double>(d);
        std::vector<double> coord_sq(d);
        double sum_p = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            coord_sq[j] = rs->alpha[j] * rs->alpha[j] * inclusion;
            sum_p += pow_abs(rs->alpha[j], p);
        }
        out.coord_sq = std::move(coord_sq);
        out.p_norm = inclusion * sum_p;
        if (rs->alpha_uniform) {
            const double c = rs->alpha.front();
            out.sq_norm = c * c * std::pow(static_cast<double>(rs->k), 2.0 / p);
        } else if (p == 2.0) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += rs->alpha[j] * rs->alpha[j];
            out.sq_norm = inclusion * s;
        }
        out.mean = Vector(d, 0.0);
        return out;
    }
    if (const auto* gs = std::get_if<detail::GaussianSteps>(&data_)) {
        std::vector<double> coord_sq(d);
        for (std::size_t j = 0; j < d; ++j) coord_sq[j] = gs->sigma[j] * gs->sigma[j];
        if (p == 2.0) {
            double s = 0.0;
            for (double v : coord_sq) s += v;
            out.sq_norm = s;
            out.p_norm = s;
        } else if (d == 1) {
            out.sq_norm = coord_sq[0];
            out.p_norm = gaussian_abs_moment(p) * pow_abs(gs->sigma[0], p);
        }
        out.coord_sq = std::move(coord_sq);
        out.mean = Vector(d, 0.0);
        return out;
    }
    if (const auto* dr = std::get_if<detail::DiscreteRadial>(&data_)) {
        double sq = 0.0, pm = 0.0;
        for (std::size_t i = 0; i < dr->radii.size(); ++i) {
            sq += dr->probs[i] * dr->radii[i] * dr->radii[i];
            pm += dr->probs[i] * pow_abs(dr->radii[i], p);
        }
        out.sq_norm = sq;
        out.p_norm = pm;
        std::vector<double> coord_sq(d, 0.0);
        if (dr->axis_mode == AxisMode::Fixed) {
            coord_sq[0] = sq;
        } else {
            for (std::size_t j = 0; j < d; ++j) coord_sq[j] = sq / static_cast<double>(d);
        }
        out.coord_sq = std::move(coord_sq);
        out.mean = Vector(d, 0.0);
        return out;
    }
    if (const auto* pm = std::get_if<detail::PointMass>(&data_)) {
        const double norm = lp_norm(pm->x, space_);
        out.sq_norm = norm * norm;
        out.p_norm = std::pow(norm, p);
        std::vector<double> coord_sq(d);
        for (std::size_t j = 0; j < d; ++j) coord_sq[j] = pm->x[j] * pm->x[j];
        out.coord_sq = std::move(coord_sq);
        out.mean = pm->x;
        return out;
    }
    if (const auto* tw = std::get_if<detail::TypeWitness>(&data_)) {
        // E||X||^2 = sum_j ||x_j||^2 for the sqrt(N)-scaled uniform pick.
        double sq = 0.0, pmom = 0.0;
        const double inv_n = 1.0 / static_cast<double>(tw->scaled.size());
        for (const auto& v : tw->scaled) {
            const double norm = lp_norm(v, space_);
            sq += inv_n * norm * norm;
            pmom += inv_n * std::pow(norm, p);
        }
        out.sq_norm = sq;
        out.p_norm = pmom;
        std::vector<double> coord_sq(d, 0.0);
        for (const auto& v : tw->scaled) {
            for (std::size_t c = 0; c < d; ++c) coord_sq[c] += inv_n * v[c] * v[c];
        }
        out.coord_sq = std::move(coord_sq);
        out.mean = Vector(d, 0.0);
        return out;
    }
    if (const auto* sh = std::get_if<detail::Shifted>(&data_)) {
        if (auto atoms = atom_law()) {
            double sq = 0.0, pmom = 0.0;
            std::vector<double> coord_sq(d, 0.0);
            Vector mean(d, 0.0);
            for (const auto& a : atoms->atoms) {
                const double norm = lp_norm(a.x, space_);
                sq += a.prob * norm * norm;
                pmom += a.prob * std::pow(norm, p);
                for (std::size_t c = 0; c < d; ++c) {
                    coord_sq[c] += a.prob * a.x[c] * a.x[c];
                    mean[c] += a.prob * a.x[c];
                }
            }
            out.sq_norm = sq;
            out.p_norm = pmom;
            out.coord_sq = std::move(coord_sq);
            out.mean = std::move(mean);
            return out;
        }
        const AnalyticMoments base = sh->base->analytic_moments();
        if (sh->base->symmetric()) {
            if (base.coord_sq) {
                std::vector<double> coord_sq = *base.coord_sq;
                for (std::size_t c = 0; c < d; ++c) {
                    coord_sq[c] += sh->shift[c] * sh->shift[c];
                }
                out.coord_sq = std::move(coord_sq);
            }
            if (base.sq_norm && p == 2.0) {
                out.sq_norm = *base.sq_norm + kernels::sum_sq(sh->shift.data(), d);
                out.p_norm = out.sq_norm;
            }
            out.mean = sh->shift;
        }
        return out;
    }
    return out;
}

std::optional<std::vector<double>> StepDistribution::truncated_coord_sq(double cutoff) const {
    if (!(cutoff > 0.0)) throw std::invalid_argument("truncated_coord_sq: cutoff must be positive");
    const auto d = static_cast<std::size_t>(space_.d);
    const double p = space_.p;

    const auto clip_factor_sq = [cutoff](double norm) {
        if (norm <= cutoff) return 1.0;
        const double f = cutoff / norm;
        return f * f;
    };

    if (const auto* fs = std::get_if<detail::FixedSubsetRademacher>(&data_)) {
        double sum_p = 0.0;
        for (double a : fs->alpha) sum_p += pow_abs(a, p);
        const double factor = clip_factor_sq(std::pow(sum_p, 1.0 / p));
        std::vector<double> out(d, 0.0);
        for (std::size_t i = 0; i < fs->subset.size(); ++i) {
            out[static_cast<std::size_t>(fs->subset[i])] = fs->alpha[i] * fs->alpha[i] * factor;
        }
        return out;
    }
    if (const auto* rs = std::get_if<detail::RandomSubsetRademacher>(&data_)) {
        if (!rs->alpha_uniform) return std::nullopt;
        const double c = rs->alpha.front();
        const double factor =
            clip_factor_sq(c * std::pow(static_cast<double>(rs->k), 1.0 / p));
        const double inclusion = static_cast<double>(rs->k) / static_cast<double>(d);
        return std::vector<double>(d, c * c * inclusion * factor);
    }
    if (const auto* gs = std::get_if<detail::GaussianSteps>(&data_)) {
        if (d != 1) return std::nullopt;
        const double sigma = gs->sigma[0];
        if (sigma == 0.0) return std::vector<double>{0.0};
        const double z = cutoff / sigma;
        // E(X^2; |X| <= c) + c^2 P(|X| > c) for X ~ N(0, sigma^2).
        const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        const double inside = sigma * sigma * ((2.0 * normal_cdf(z) - 1.0) - 2.0 * z * phi);
        const double outside = cutoff * cutoff * 2.0 * (1.0 - normal_cdf(z));
        return std::vector<double>{inside + outside};
    }
    if (const auto* dr = std::get_if<detail::DiscreteRadial>(&data_)) {
        double mass = 0.0;
        for (std::size_t i = 0; i < dr->radii.size(); ++i) {
            const double clipped = std::min(dr->radii[i], cutoff);
            mass += dr->probs[i] * clipped * clipped;
        }
        std::vector<double> out(d, 0.0);
        if (dr->axis_mode == AxisMode::Fixed) {
            out[0] = mass;
        } else {
            for (std::size_t j = 0; j < d; ++j) out[j] = mass / static_cast<double>(d);
        }
        return out;
    }
    if (const auto* tw = std::get_if<detail::TypeWitness>(&data_)) {
        std::vector<double> out(d, 0.0);
        const double inv_n = 1.0 / static_cast<double>(tw->scaled.size());
        for (const auto& v : tw->scaled) {
            const double factor = clip_factor_sq(lp_norm(v, space_));
            for (std::size_t c = 0; c < d; ++c) out[c] += inv_n * factor * v[c] * v[c];
        }
        return out;
    }
    // Point masses and shifted laws go through the atom law.
    if (auto atoms = atom_law()) {
        std::vector<double> out(d, 0.0);
        for (const auto& a : atoms->atoms) {
            const double factor = clip_factor_sq(lp_norm(a.x, space_));
            for (std::size_t c = 0; c < d; ++c) out[c] += a.prob * factor * a.x[c] * a.x[c];
        }
        return out;
    }
    return std::nullopt;
}

std::string StepDistribution::describe() const {
    std::ostringstream os;
    os << variant_name() << " on l^" << space_.p << " (d=" << space_.d << ")";
    struct Visitor {
        std::ostringstream& os;
        void operator()(const detail::FixedSubsetRademacher& fs) const {
            os << ", |A|=" << fs.subset.size();
        }
        void operator()(const detail::RandomSubsetRademacher& rs) const {
            os << ", k=" << rs.k << (rs.alpha_uniform ? ", uniform weights" : ", general weights");
        }
        void operator()(const detail::GaussianSteps&) const {}
        void operator()(const detail::DiscreteRadial& dr) const {
            os << ", " << dr.radii.size() << " radii, "
               << (dr.axis_mode == AxisMode::Fixed ? "fixed axis" : "uniform axis");
        }
        void operator()(const detail::PointMass&) const { os << ", degenerate"; }
        void operator()(const detail::TypeWitness& tw) const {
            os << ", N=" << tw.vectors.size();
        }
        void operator()(const detail::Shifted& sh) const {
            os << ", base=" << sh.base->variant_name();
        }
    };
    std::visit(Visitor{os}, data_);
    const auto moments = analytic_moments();
    os << "; analytic norm law: " << (norm_law() ? "yes" : "no");
    if (moments.sq_norm) os << "; E||X||^2 = " << *moments.sq_norm;
    if (std::holds_alternative<detail::TypeWitness>(data_)) {
        os << " (= sum_j ||x_j||^2)";
    }
    os << "; symmetric: " << (symmetric() ? "yes" : "no");
    if (degenerate()) os << "; flagged degenerate";
    return os.str();
}

// ---------------------------------------------------------------------------
// Truncation and the Gaussian associate
// ---------------------------------------------------------------------------

Vector truncate_step(const Vector& x, double r, const SpaceSpec& spec) {
    if (!(r > 0.0)) throw std::invalid_argument("truncate_step: r must be positive");
    const double cutoff = 3.0 * r;
    const double norm = lp_norm(x, spec);
    if (norm <= cutoff) return x;
    // Stay a hair below the cap so rounded norms cannot exceed it.
    const double scale = cutoff / norm * (1.0 - 1e-12);
    Vector out = x;
    for (double& c : out) c *= scale;
    return out;
}

namespace {

GaussianAssociate associate_from_coord_sq(double p, std::vector<double> coord_sq, bool from_mc,
                                          std::uint64_t samples) {
    GaussianAssociate g;
    g.p = p;
    g.mp = gaussian_abs_moment(p);
    double sum_half_p = 0.0;
    for (double v : coord_sq) sum_half_p += std::pow(v, 0.5 * p);
    g.lp_moment = g.mp * sum_half_p;
    g.sq_surrogate = std::pow(sum_half_p, 2.0 / p);
    g.coord_sq = std::move(coord_sq);
    g.from_mc = from_mc;
    g.mc_samples = samples;
    return g;
}

}  // namespace

GaussianAssociate gaussian_associate(const StepDistribution& dist) {
    auto moments = dist.analytic_moments();
    if (!moments.coord_sq) {
        throw std::runtime_error(
            "gaussian_associate: no analytic coordinate second moments for variant '" +
            dist.variant_name() + "'; use gaussian_associate_mc");
    }
    return associate_from_coord_sq(dist.space().p, std::move(*moments.coord_sq), false, 0);
}

GaussianAssociate gaussian_associate_mc(const StepDistribution& dist, std::uint64_t samples,
                                        std::uint64_t seed) {
    return associate_from_coord_sq(dist.space().p, mc_coord_sq(dist, samples, seed), true, samples);
}

GaussianAssociate gaussian_associate_truncated(const StepDistribution& dist, double r) {
    auto coord_sq = dist.truncated_coord_sq(3.0 * r);
    if (!coord_sq) {
        throw std::runtime_error(
            "gaussian_associate_truncated: no analytic truncated moments for variant '" +
            dist.variant_name() + "'; use gaussian_associate_truncated_mc");
    }
    return associate_from_coord_sq(dist.space().p, std::move(*coord_sq), false, 0);
}

GaussianAssociate gaussian_associate_truncated_mc(const StepDistribution& dist, double r,
                                                  std::uint64_t samples, std::uint64_t seed) {
    return associate_from_coord_sq(dist.space().p, mc_coord_sq(dist, samples, seed, 3.0 * r), true,
                                   samples);
}

std::vector<double> mc_coord_sq(const StepDistribution& dist, std::uint64_t samples,
                                std::uint64_t seed, double cutoff) {
    if (samples == 0) throw std::invalid_argument("mc_coord_sq: need samples >= 1");
    const auto d = static_cast<std::size_t>(dist.space().d);
    constexpr std::uint64_t kBlock = 1u << 14;
    const std::uint64_t blocks = block_count(samples, kBlock);
    std::vector<std::vector<double>> partials(blocks, std::vector<double>(d, 0.0));
    const double r_equiv = cutoff > 0.0 ? cutoff / 3.0 : 0.0;

    parallel_blocks(samples, kBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        auto& acc = partials[b];
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(seed, stream_salt::kCoordMoments + i);
            Vector x = dist.sample(rng);
            if (cutoff > 0.0) x = truncate_step(x, r_equiv, dist.space());
            for (std::size_t c = 0; c < d; ++c) acc[c] += x[c] * x[c];
        }
    });

    std::vector<double> total(d, 0.0);
    for (const auto& acc : partials) {
        for (std::size_t c = 0; c < d; ++c) total[c] += acc[c];
    }
    for (double& v : total) v /= static_cast<double>(samples);
    return total;
}

}  // namespace pruitt

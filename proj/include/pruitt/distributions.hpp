#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pruitt/rng.hpp"
#include "pruitt/space.hpp"

namespace pruitt {

class StepDistribution;

enum class AxisMode { Fixed, UniformRandom };

// Discrete law of ||X||: sorted, consolidated atoms (radius, probability).
struct NormLaw {
    struct Atom {
        double radius;
        double prob;
    };
    std::vector<Atom> atoms;

    double tail_prob(double r) const;       // P(||X|| > r), strict
    double truncated_sq(double r) const;    // E(||X||^2 ; ||X|| <= r)
    double moment(double q) const;          // E ||X||^q
    double mass_at_zero() const;
    double min_positive_radius() const;     // +inf when none
    double max_radius() const;
};

// Finite-support law of X itself (used for non-symmetric analytics).
struct AtomLaw {
    struct Atom {
        Vector x;
        double prob;
    };
    std::vector<Atom> atoms;
};

struct AnalyticMoments {
    std::optional<double> sq_norm;                // E ||X||^2
    std::optional<std::vector<double>> coord_sq;  // E X_j^2 per coordinate
    std::optional<double> p_norm;                 // E ||X||^p, p the space exponent
    std::optional<Vector> mean;                   // EX
};

// Centered Gaussian with X's coordinate covariance, summarized through the
// l^p closed form E||G(X)||^p = E|g|^p * sum_j v_j^{p/2}. sq_surrogate is
// (sum_j v_j^{p/2})^{2/p}: exactly E||G(X)||^2 at p = 2 and the Gaussian-norm
// comparability surrogate otherwise.
struct GaussianAssociate {
    double p = 2.0;
    std::vector<double> coord_sq;
    double mp = 1.0;            // E|g|^p
    double lp_moment = 0.0;     // E||G(X)||^p
    double sq_surrogate = 0.0;  // (lp_moment / mp)^{2/p}
    bool from_mc = false;
    std::uint64_t mc_samples = 0;
};

// Reusable per-path scratch: one sampled step, sparse or dense.
struct StepBuffer {
    bool dense = false;
    Vector dense_step;
    std::vector<std::pair<int, double>> sparse;

    // partial Fisher-Yates scratch for subset sampling
    std::vector<int> fy_perm;
    std::vector<int> fy_swaps;
};

namespace detail {

struct FixedSubsetRademacher {
    std::vector<int> subset;    // 0-based coordinate indices
    std::vector<double> alpha;  // aligned with subset
};
struct RandomSubsetRademacher {
    int k = 1;
    std::vector<double> alpha;  // one weight per coordinate
    bool alpha_uniform = false;
};
struct GaussianSteps {
    std::vector<double> sigma;
};
struct DiscreteRadial {
    std::vector<double> radii;
    std::vector<double> probs;
    AxisMode axis_mode = AxisMode::Fixed;
    std::vector<double> cum;  // cumulative probabilities, back() == 1
};
struct PointMass {
    Vector x;
};
struct TypeWitness {
    std::vector<Vector> vectors;
    std::vector<Vector> scaled;  // sqrt(N) * x_j, precomputed
};
struct Shifted {
    std::shared_ptr<const StepDistribution> base;
    Vector shift;
};

using DistVariant = std::variant<FixedSubsetRademacher, RandomSubsetRademacher, GaussianSteps,
                                 DiscreteRadial, PointMass, TypeWitness, Shifted>;

}  // namespace detail

// The step-distribution zoo. Samplers are stateless given an RngStream;
// analytic providers return nullopt instead of approximating silently.
class StepDistribution {
public:
    static StepDistribution fixed_subset_rademacher(SpaceSpec space, std::vector<int> subset,
                                                    std::vector<double> alpha);
    static StepDistribution random_subset_rademacher(SpaceSpec space, int k,
                                                     std::vector<double> alpha);
    static StepDistribution gaussian_steps(SpaceSpec space, std::vector<double> sigma);
    static StepDistribution discrete_radial(SpaceSpec space, std::vector<double> radii,
                                            std::vector<double> probs, AxisMode mode);
    static StepDistribution point_mass(SpaceSpec space, Vector x);
    static StepDistribution type_witness(SpaceSpec space, std::vector<Vector> vectors);
    static StepDistribution shifted(StepDistribution base, Vector shift);

    const SpaceSpec& space() const { return space_; }
    std::string variant_name() const;
    bool symmetric() const;
    bool degenerate() const;  // point masses; excluded from non-degeneracy suites

    void sample_into(StepBuffer& buf, RngStream& rng) const;
    Vector sample(RngStream& rng) const;

    std::optional<NormLaw> norm_law() const;
    std::optional<AtomLaw> atom_law() const;
    AnalyticMoments analytic_moments() const;

    // E X-hat_j^2 where X-hat is X radially clipped to norm <= cutoff.
    std::optional<std::vector<double>> truncated_coord_sq(double cutoff) const;

    std::string describe() const;

    const detail::DistVariant& raw() const { return data_; }

private:
    StepDistribution(SpaceSpec space, detail::DistVariant data)
        : space_(space), data_(std::move(data)) {}

    SpaceSpec space_;
    detail::DistVariant data_;
};

// The 3r radial clip: x unchanged when ||x|| <= 3r, otherwise scaled onto the
// sphere of radius 3r (a hair inside it, so downstream comparisons stay on
// the closed side).
Vector truncate_step(const Vector& x, double r, const SpaceSpec& spec);

// Gaussian associate from analytic coordinate moments; throws with a message
// pointing at the MC variant when they are unavailable.
GaussianAssociate gaussian_associate(const StepDistribution& dist);
GaussianAssociate gaussian_associate_mc(const StepDistribution& dist, std::uint64_t samples,
                                        std::uint64_t seed);
// Same, for the 3r-truncated step.
GaussianAssociate gaussian_associate_truncated(const StepDistribution& dist, double r);
GaussianAssociate gaussian_associate_truncated_mc(const StepDistribution& dist, double r,
                                                  std::uint64_t samples, std::uint64_t seed);

// MC estimate of per-coordinate second moments (optionally of the truncated
// step when cutoff > 0); deterministic for fixed (seed, samples).
std::vector<double> mc_coord_sq(const StepDistribution& dist, std::uint64_t samples,
                                std::uint64_t seed, double cutoff = 0.0);

}  // namespace pruitt

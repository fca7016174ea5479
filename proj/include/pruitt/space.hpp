#pragma once

#include <cstddef>
#include <vector>

namespace pruitt {

using Vector = std::vector<double>;

// Ambient dimension and norm exponent of the l^p space the walk lives in.
// p is a real exponent >= 1; p = 2 is the Euclidean/Hilbert case. p = infinity
// is not supported.
struct SpaceSpec {
    int d;
    double p;

    SpaceSpec(int dimension, double exponent);

    bool operator==(const SpaceSpec&) const = default;
};

// (sum_j |x_j|^p)^{1/p}, computed with max-magnitude rescaling so large p and
// large coordinates cannot overflow.
double lp_norm(const double* x, std::size_t n, double p);
double lp_norm(const Vector& x, const SpaceSpec& spec);

// s += x, coordinatewise.
void add_assign(Vector& s, const Vector& x);

// sum_j |x_j|^p without rescaling -- the walk-internal representation of the
// norm. Safe for the magnitudes the simulator produces (|x_j| and p bounded
// so |x_j|^p stays far from the double range).
double norm_pow_sum(const double* x, std::size_t n, double p);

// Strict comparison ||x|| > r evaluated on power sums; this is the single
// predicate the exit-time definition uses.
bool norm_exceeds(const Vector& x, double r, const SpaceSpec& spec);

}  // namespace pruitt

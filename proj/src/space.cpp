#include "pruitt/space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pruitt/kernels.hpp"

namespace pruitt {

SpaceSpec::SpaceSpec(int dimension, double exponent) : d(dimension), p(exponent) {
    if (d < 1) throw std::invalid_argument("SpaceSpec: dimension must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw std::invalid_argument("SpaceSpec: norm exponent must be finite and >= 1");
    }
}

double lp_norm(const double* x, std::size_t n, double p) {
    const double m = kernels::max_abs(x, n);
    if (m == 0.0) return 0.0;
    if (!std::isfinite(m)) throw std::invalid_argument("lp_norm: non-finite coordinate");
    if (p == 2.0) return m * std::sqrt(kernels::sum_sq_scaled(x, n, 1.0 / m));
    return m * std::pow(kernels::sum_abs_pow_scaled(x, n, 1.0 / m, p), 1.0 / p);
}

double lp_norm(const Vector& x, const SpaceSpec& spec) {
    if (x.size() != static_cast<std::size_t>(spec.d)) {
        throw std::invalid_argument("lp_norm: vector has dimension " + std::to_string(x.size()) +
                                    ", space expects " + std::to_string(spec.d));
    }
    return lp_norm(x.data(), x.size(), spec.p);
}

void add_assign(Vector& s, const Vector& x) {
    if (s.size() != x.size()) throw std::invalid_argument("add_assign: dimension mismatch");
    kernels::add_assign(s.data(), x.data(), s.size());
}

double norm_pow_sum(const double* x, std::size_t n, double p) {
    return kernels::sum_abs_pow(x, n, p);
}

bool norm_exceeds(const Vector& x, double r, const SpaceSpec& spec) {
    if (x.size() != static_cast<std::size_t>(spec.d)) {
        throw std::invalid_argument("norm_exceeds: dimension mismatch");
    }
    return norm_pow_sum(x.data(), x.size(), spec.p) > std::pow(r, spec.p);
}

}  // namespace pruitt

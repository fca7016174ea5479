#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pruitt/kernels.hpp"
#include "pruitt/rng.hpp"

using namespace pruitt;

namespace {

std::vector<double> random_array(std::size_t n, RngStream& rng, double scale = 1.0) {
    std::vector<double> x(n);
    for (auto& v : x) v = scale * (rng.next_unit() * 2.0 - 1.0);
    return x;
}

const std::vector<std::size_t> kSizes{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 33, 100, 1001, 4096};

}  // namespace

TEST_CASE("scalar kernels match a straightforward reference") {
    RngStream rng(11, 0);
    const auto& ks = kernels::scalar();
    for (std::size_t n : kSizes) {
        const auto x = random_array(n, rng, 3.0);
        double ref_sq = 0.0, ref_max = 0.0;
        for (double v : x) {
            ref_sq += v * v;
            ref_max = std::max(ref_max, std::fabs(v));
        }
        CHECK(ks.sum_sq(x.data(), n) == doctest::Approx(ref_sq).epsilon(1e-13));
        CHECK(ks.max_abs(x.data(), n) == ref_max);
        for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, 7.0, 16.0}) {
            double ref_p = 0.0;
            for (double v : x) ref_p += std::pow(std::fabs(v), p);
            CHECK(ks.sum_abs_pow(x.data(), n, p) ==
                  doctest::Approx(ref_p).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("avx2 backend agrees with scalar") {
    const kernels::Backend* simd = kernels::avx2();
    if (simd == nullptr) {
        MESSAGE("avx2 unavailable on this CPU; dispatch falls back to scalar");
        CHECK(kernels::active().name == doctest::String("scalar"));
        return;
    }
    const auto& ks = kernels::scalar();
    RngStream rng(12, 0);
    for (std::size_t n : kSizes) {
        const auto x = random_array(n, rng, 2.0);
        const auto y = random_array(n, rng, 0.5);

        // Reductions: reassociation only, so tight relative agreement.
        CHECK(simd->sum_sq(x.data(), n) ==
              doctest::Approx(ks.sum_sq(x.data(), n)).epsilon(1e-12).scale(1.0));
        CHECK(simd->sum_sq_scaled(x.data(), n, 0.37) ==
              doctest::Approx(ks.sum_sq_scaled(x.data(), n, 0.37)).epsilon(1e-12).scale(1.0));
        for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, 16.0, 2.5}) {
            CHECK(simd->sum_abs_pow(x.data(), n, p) ==
                  doctest::Approx(ks.sum_abs_pow(x.data(), n, p)).epsilon(1e-12).scale(1.0));
            CHECK(simd->sum_abs_pow_scaled(x.data(), n, 1.7, p) ==
                  doctest::Approx(ks.sum_abs_pow_scaled(x.data(), n, 1.7, p))
                      .epsilon(1e-12)
                      .scale(1.0));
        }

        // Elementwise ops: bit-identical.
        CHECK(simd->max_abs(x.data(), n) == ks.max_abs(x.data(), n));
        auto a = x;
        auto b = x;
        kernels::scalar().add_assign(a.data(), y.data(), n);
        simd->add_assign(b.data(), y.data(), n);
        CHECK(a == b);
        a = x;
        b = x;
        kernels::scalar().accumulate_scaled(a.data(), y.data(), n, -1.25);
        simd->accumulate_scaled(b.data(), y.data(), n, -1.25);
        CHECK(a == b);
    }
}

TEST_CASE("reductions stay close to the compensated oracle") {
    RngStream rng(13, 0);
    for (std::size_t n : {std::size_t{8}, std::size_t{100}, std::size_t{4096}}) {
        auto x = random_array(n, rng, 1.0);
        // Mix magnitudes to stress the summation.
        for (std::size_t i = 0; i < n; i += 3) x[i] *= 1e-8;
        const double ref = oracle::euclidean_norm_compensated(x);
        CHECK(std::sqrt(kernels::sum_sq(x.data(), n)) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("force_backend switches and rejects unknown names") {
    const std::string initial = kernels::active().name;
    kernels::force_backend("scalar");
    CHECK(kernels::active().name == doctest::String("scalar"));
    if (kernels::avx2_supported()) {
        kernels::force_backend("avx2");
        CHECK(kernels::active().name == doctest::String("avx2"));
    }
    CHECK_THROWS_AS(kernels::force_backend("neon"), std::invalid_argument);
    kernels::force_backend(initial);
}

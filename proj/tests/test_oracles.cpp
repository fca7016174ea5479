#include <doctest.h>

#include "oracles.hpp"

// Self-consistency of the test oracles; these freeze the expected values the
// engine is later checked against.

TEST_CASE("gambler's ruin: linear solve matches the closed form") {
    for (int m : {1, 2, 3, 5, 11, 21, 51}) {
        const auto sol = oracle::gambler_ruin_solve(m);
        CHECK(sol.mean == doctest::Approx(static_cast<double>(m) * m).epsilon(1e-10));
        CHECK(sol.variance >= 0.0);
    }
    // m = 1: T is deterministic (one step always exits).
    CHECK(oracle::gambler_ruin_solve(1).variance == doctest::Approx(0.0));
    CHECK(oracle::gambler_ruin_mean(10.0) == 121.0);
    CHECK(oracle::gambler_ruin_mean(10.5) == 121.0);
    CHECK(oracle::gambler_ruin_mean(20.0) == 441.0);
    CHECK(oracle::gambler_ruin_mean(50.0) == 2601.0);
}

TEST_CASE("gambler's ruin: variance scale at m=11 supports the quoted CI") {
    // Monte Carlo ci ~ 1.96 sqrt(Var/1e5) ~ 0.6 for r = 10.
    const auto sol = oracle::gambler_ruin_solve(11);
    const double ci = 1.96 * std::sqrt(sol.variance / 1e5);
    CHECK(ci > 0.4);
    CHECK(ci < 0.9);
}

TEST_CASE("gaussian truncated moments: limits and known values") {
    CHECK(oracle::gaussian_tail_prob(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(oracle::gaussian_tail_prob(8.0, 1.0) < 2e-15);
    CHECK(oracle::gaussian_truncated_sq(40.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle::gaussian_truncated_sq(40.0, 2.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(oracle::gaussian_tail_prob(1.0, 1.0) ==
          doctest::Approx(0.31731050786291415).epsilon(1e-12));
}

TEST_CASE("compensated euclidean norm survives magnitude spreads") {
    std::vector<double> x{3.0, 4.0};
    CHECK(oracle::euclidean_norm_compensated(x) == doctest::Approx(5.0).epsilon(1e-15));
    std::vector<double> big{1e200, 1e200};
    CHECK(oracle::euclidean_norm_compensated(big) ==
          doctest::Approx(1e200 * std::sqrt(2.0)).epsilon(1e-14));
    std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK(oracle::euclidean_norm_compensated(zero) == 0.0);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "wldecoh/worldline.hpp"

using namespace wldecoh;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("proper acceleration per worldline") {
    CHECK(Worldline::inertial().proper_acceleration() == 0.0);
    CHECK(Worldline::hyperbolic(3.0).proper_acceleration() == 3.0);

    // v = 0.6: gamma = 1.25, a = v xi gamma = 0.75 xi
    const auto w = Worldline::circular(0.6, 1.0);
    CHECK_THAT(w.gamma(), WithinRel(1.25, 1e-15));
    CHECK_THAT(w.proper_acceleration(), WithinRel(0.75, 1e-15));
}

TEST_CASE("worldline validation") {
    CHECK_THROWS_AS(Worldline::hyperbolic(-1.0), Error);
    CHECK_THROWS_AS(Worldline::hyperbolic(0.0), Error);
    CHECK_THROWS_AS(Worldline::circular(1.0, 1.2), Error); // v = 1.2 > c
    CHECK_THROWS_AS(Worldline::circular(-1.0, 0.5), Error);
    CHECK_NOTHROW(Worldline::circular(0.5, 1.0));
}

TEST_CASE("solve_r against the bisection oracle") {
    CHECK_THAT(solve_r(0.5), WithinRel(oracles::solve_r_bisect(0.5), 1e-12));
    CHECK_THAT(solve_r(0.99), WithinRel(oracles::solve_r_bisect(0.99), 1e-10));
    // Frozen references from the bisection oracle.
    CHECK_THAT(solve_r(0.5), WithinRel(2.17731898496531, 1e-16 * 1e4));
    CHECK_THAT(solve_r(0.99), WithinRel(0.245811410047572, 1e-12));
    // sinh(R)/R = 2 at the v = 0.5 root.
    const double r = solve_r(0.5);
    CHECK_THAT(std::sinh(r) / r, WithinRel(2.0, 1e-13));
}

TEST_CASE("solve_r residual and domain") {
    for (double v : {0.01, 0.1, 0.5, 0.9, 0.99, 0.999, 0.9999}) {
        const double r = solve_r(v);
        CHECK(std::abs(r - v * std::sinh(r)) < 1e-12 * std::max(1.0, r));
    }
    CHECK_THROWS_MATCHES(solve_r(0.0), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::out_of_range;
                         }));
    CHECK_THROWS_AS(solve_r(1.0), Error);
    CHECK_THROWS_AS(solve_r(1.5), Error);
}

TEST_CASE("solve_r small-R asymptote and monotonicity") {
    for (double v : {0.999, 0.9995, 0.9999}) {
        const double asym = std::sqrt(6.0 * (1.0 / v - 1.0));
        CHECK_THAT(solve_r(v), WithinRel(asym, 0.01));
    }
    double prev = solve_r(0.05);
    for (double v = 0.10; v < 1.0; v += 0.05) {
        const double r = solve_r(v);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("circular spectral prefactor C(R)") {
    const auto w = Worldline::circular(0.99, 1.0);
    const auto aux = make_circular_aux(w);
    // Frozen reference evaluated from the oracle root.
    CHECK_THAT(aux.C_of_R, WithinRel(1.13826855157387, 1e-11));
    CHECK(aux.C_of_R > 0.0);

    // C scales linearly in xi at fixed v/c (R and gamma depend on v only).
    const auto w2 = Worldline::circular(0.495, 2.0); // same v = 0.99
    CHECK_THAT(c_of_r(w2), WithinRel(2.0 * aux.C_of_R, 1e-12));

    // The denominator stays positive across the ultrarelativistic range.
    for (int i = 0; i < 100; ++i) {
        const double v = 0.9 + 0.000999 * i;
        const double r = solve_r(v);
        CHECK(v * std::cosh(r) - 1.0 > 0.0);
    }
    CHECK_THROWS_MATCHES(c_of_r(Worldline::hyperbolic(1.0)), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::wrong_kind;
                         }));
}

TEST_CASE("hyperbolic worldline satisfies x^2 - t^2 = 1/a^2") {
    const double a = 2.5;
    const auto w = Worldline::hyperbolic(a);
    for (double tau : {0.0, 1.0 / a, 10.0 / a}) {
        const auto ev = w.position(tau);
        // cosh^2 - sinh^2 loses ~eps*cosh^2 to cancellation at a tau = 10.
        CHECK_THAT(ev[1] * ev[1] - ev[0] * ev[0],
                   WithinRel(1.0 / (a * a), 1e-6));
    }
}

TEST_CASE("circular worldline stays on the circle") {
    const auto w = Worldline::circular(0.7, 1.1);
    for (double tau : {0.0, 0.3, 2.0, 17.5}) {
        const auto ev = w.position(tau);
        CHECK_THAT(ev[1] * ev[1] + ev[2] * ev[2], WithinRel(0.49, 1e-12));
    }
}

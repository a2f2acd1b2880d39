#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wldecoh/params.hpp"
#include "wldecoh/response.hpp"

using namespace wldecoh;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const ModelParams kDefault = build_params(1.0, 1.0, 1.0, 1.0);
// Hypothetical undamped oscillator (finite coupling, beta forced to zero)
// for the closed-form checks that sit exactly on the beta = 0 line.
const ModelParams kUndamped{1.0, 1.0, 1.0, 1.0, 0.0};
}

TEST_CASE("alpha0 static limit and resonance") {
    CHECK(alpha0(0.0, kDefault) == complexd(1.0, 0.0)); // e^2/(m wq^2)

    // beta = 0, w = sqrt(2) wq: denominator -2wq^2 + wq^2
    const complexd v = alpha0(std::sqrt(2.0), kUndamped);
    CHECK_THAT(v.real(), WithinRel(-1.0, 4e-16));
    CHECK_THAT(v.imag(), WithinAbs(0.0, 1e-18));

    // On resonance the real part cancels: purely imaginary, 1/(2 i beta wq^3).
    const complexd r = alpha0(1.0, kDefault);
    CHECK_THAT(r.imag(), WithinRel(-1.0 / (2.0 * kDefault.beta), 1e-13));
    CHECK_THAT(std::abs(r.real()) / std::abs(r.imag()), WithinAbs(0.0, 1e-12));
}

TEST_CASE("alpha0 pole on the real axis is rejected for beta = 0") {
    CHECK_THROWS_MATCHES(alpha0(1.0, kUndamped), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::pole_on_real_axis;
                         }));
    CHECK_THROWS_AS(eta(-1.0, kUndamped), Error);
    CHECK_NOTHROW(alpha0(1.0, kDefault)); // damped case is finite
}

TEST_CASE("eta fixed points") {
    CHECK(eta(0.0, kDefault) == complexd(2.0, 0.0));
    const complexd v = eta(std::sqrt(3.0), kUndamped);
    CHECK_THAT(v.real(), WithinRel(-1.0, 4e-16));
    // |1 - 2 eta(0)|^2 = 9, the w -> 0 weight of the time-dilation kernel.
    CHECK_THAT(std::norm(1.0 - 2.0 * eta(0.0, kDefault)), WithinRel(9.0, 1e-15));
}

TEST_CASE("conjugate symmetry is bit-exact over random frequencies") {
    std::mt19937_64 rng(0xC0FFEE);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double w = dist(rng);
        const complexd a = alpha0(w, kDefault);
        const complexd am = alpha0(-w, kDefault);
        CHECK(am.real() == a.real());
        CHECK(am.imag() == -a.imag());
        const complexd h = eta(w, kDefault);
        const complexd hm = eta(-w, kDefault);
        CHECK(hm.real() == h.real());
        CHECK(hm.imag() == -h.imag());
    }
}

TEST_CASE("passivity and large-frequency decay") {
    for (double lw = -3.0; lw <= 3.0; lw += 0.05) {
        const double w = std::pow(10.0, lw);
        CHECK(alpha0(w, kDefault).imag() < 0.0);
    }
    const ModelParams weak = build_params(std::sqrt(0.01 * 8.0 * std::numbers::pi * 0.999),
                                          1.0, 1.0, 1.0);
    REQUIRE(weak.beta < 0.01);
    const double w = 1e3;
    CHECK(std::abs(alpha0(w, weak)) < 1.1 * (weak.e * weak.e / weak.m) / (w * w));
}

TEST_CASE("redshifted polarizability") {
    CHECK(alpha_redshifted(0.7, 0.0, kDefault) == alpha0(0.7, kDefault));
    // w = 0, aX = 0.1: alpha0(0) (1 - 2 * 0.1) = 0.8 e^2/(m wq^2)
    CHECK_THAT(alpha_redshifted(0.0, 0.1, kDefault).real(),
               WithinRel(0.8, 1e-15));
    CHECK_THROWS_MATCHES(alpha_redshifted(1.0, 1.0, kDefault), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::superposition_too_large;
                         }));

    // Affine in aX: second difference vanishes.
    const double w0 = 1.7;
    const complexd base = alpha_redshifted(w0, 0.0, kDefault);
    const complexd one = alpha_redshifted(w0, 0.2, kDefault);
    const complexd two = alpha_redshifted(w0, 0.4, kDefault);
    CHECK_THAT(std::abs((two - base) - 2.0 * (one - base)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("dispersion weight S") {
    CHECK_THAT(s_weight(0.0, kDefault), WithinRel(0.5, 1e-15));
    CHECK_THAT(s_weight(std::sqrt(3.0), kUndamped), WithinRel(0.5, 4e-15));
    // S is even in omega.
    for (double w : {0.3, 1.0, 2.5, 17.0}) {
        CHECK_THAT(s_weight(-w, kDefault), WithinRel(s_weight(w, kDefault), 1e-15));
    }
}

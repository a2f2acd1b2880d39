#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "wldecoh/qbm.hpp"

using namespace wldecoh;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Least-squares slope of y against t.
double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = static_cast<double>(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    return (n * sty - st * sy) / (n * stt - st * st);
}

} // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid1D(63, 1.0), Error);
    CHECK_THROWS_AS(Grid1D(65, 1.0), Error); // odd
    CHECK_THROWS_AS(Grid1D(128, 0.0), Error);
    const Grid1D g(128, 2.0);
    CHECK_THAT(g.dx(), WithinRel(4.0 / 127.0, 1e-15));
    CHECK(g.x(0) == -2.0);
}

TEST_CASE("single Gaussian is pure with unit trace") {
    const Grid1D g(256, 2.0);
    const auto st = build_superposition(0.0, 0.0, 0.1, g);
    CHECK_THAT(trace(st), WithinAbs(1.0, 1e-10));
    CHECK_THAT(purity(st), WithinAbs(1.0, 1e-6));
    CHECK(hermiticity_defect(st) == 0.0);
}

TEST_CASE("cat state has half its mass in the far off-diagonal lobes") {
    const Grid1D g(256, 2.0);
    const double sigma = 0.1, sep = 8.0 * sigma;
    const auto st = build_superposition(0.0, sep, sigma, g);
    CHECK_THAT(trace(st), WithinAbs(1.0, 1e-10));
    // Two symmetric lobes, each about 0.25 of L1 mass at sigma = 0.1.
    CHECK_THAT(coherence_norm(st, sep), WithinRel(0.5, 0.10));

    // Equal weights put each lobe peak at half the density a lone Gaussian
    // of the same width would reach on the diagonal.
    const auto lone = build_superposition(0.0, 0.0, sigma, g);
    const int n = g.n_points;
    double lone_peak = 0.0, off_peak = 0.0;
    for (int a = 0; a < n; ++a) {
        lone_peak = std::max(lone_peak, std::abs(lone.rho[a * n + a]));
        for (int b = 0; b < n; ++b)
            if (std::abs(g.x(a) - g.x(b)) > 0.5 * sep)
                off_peak = std::max(off_peak, std::abs(st.rho[a * n + b]));
    }
    CHECK_THAT(off_peak, WithinRel(0.5 * lone_peak, 0.05));
}

TEST_CASE("decohered mixture has no far off-diagonal mass") {
    const Grid1D g(256, 2.0);
    const double sigma = 0.1, sep = 8.0 * sigma;
    auto cat = build_superposition(0.0, sep, sigma, g);
    // Kill the coherence lobes: keep only |x - x'| <= sep/2.
    const int n = g.n_points;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (std::abs(g.x(a) - g.x(b)) > 0.5 * sep)
                cat.rho[a * n + b] = 0.0;
    CHECK(coherence_norm(cat, sep) < 1e-3);
}

TEST_CASE("superposition must fit the grid") {
    const Grid1D g(64, 1.0);
    CHECK_THROWS_MATCHES(build_superposition(0.0, 1.6, 0.2, g), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::grid_too_small;
                         }));
}

TEST_CASE("zero coefficients leave the state bitwise unchanged") {
    const Grid1D g(64, 1.0);
    const auto st = build_superposition(0.0, 0.4, 0.05, g);
    QbmCoefficients k;
    k.M = 1.0;
    const auto out = evolve(st, k, 1e-3, 50);
    REQUIRE(out.state.rho.size() == st.rho.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < st.rho.size(); ++i)
        worst = std::max(worst, std::abs(out.state.rho[i] - st.rho[i]));
    CHECK(worst == 0.0);
}

TEST_CASE("pure dephasing matches the closed form") {
    const Grid1D g(256, 1.0);
    const double sigma = 0.05, sep = 0.8;
    const auto st = build_superposition(0.0, sep, sigma, g);
    QbmCoefficients k;
    k.lambda = 1.0;
    const double t_star = 1.0 / (k.lambda * sep * sep);
    const long steps = 100;
    const double dt = t_star / static_cast<double>(steps);
    const auto out = evolve(st, k, dt, steps);

    const int n = g.n_points;
    double max_rel = 0.0, peak = 0.0;
    for (const auto& z : st.rho) peak = std::max(peak, std::abs(z));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const std::complex<double> r0 = st.rho[a * n + b];
            if (std::abs(r0) < 1e-12 * peak) continue;
            const double d = g.x(a) - g.x(b);
            const std::complex<double> expect =
                r0 * std::exp(-k.lambda * d * d * t_star);
            const double rel =
                std::abs(out.state.rho[a * n + b] - expect) / std::abs(expect);
            max_rel = std::max(max_rel, rel);
        }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("coherence decay slope equals -Lambda separation^2") {
    const Grid1D g(256, 1.0);
    const double sigma = 0.05, sep = 0.8;
    const auto st = build_superposition(0.0, sep, sigma, g);
    QbmCoefficients k;
    k.lambda = 1.0;
    const double t_star = 1.0 / (k.lambda * sep * sep);
    const long steps = 100;
    const auto out = evolve(st, k, t_star / steps, steps, 2, sep);
    std::vector<double> t, lny;
    for (const auto& pt : out.series) {
        t.push_back(pt.t);
        lny.push_back(std::log(pt.coherence));
    }
    const double slope = fit_slope(t, lny);
    CHECK_THAT(slope, WithinRel(-k.lambda * sep * sep, 0.05));
}

TEST_CASE("trace and Hermiticity are conserved over 1e4 steps") {
    const Grid1D g(128, 1.0);
    const double sep = 0.8;
    const auto st = build_superposition(0.0, sep, 0.05, g);
    QbmCoefficients k;
    k.lambda = 1.0;
    k.c1 = 0.3;
    k.c2 = 0.2;
    const auto out = evolve(st, k, 2e-4, 10000, 0, sep);
    CHECK(std::abs(trace(out.state) - 1.0) < 1e-8);
    CHECK(hermiticity_defect(out.state) < 1e-10);
}

TEST_CASE("C2-only step equals the X^2 Hamiltonian step") {
    const Grid1D g(128, 1.0);
    const auto st = build_superposition(0.0, 0.5, 0.05, g);
    QbmCoefficients k;
    k.c2 = 0.7;
    const double dt = 1e-3;
    const auto got = evolve(st, k, dt, 1);

    // Independent route: RK4 on rho' = -i [H, rho] with H = c2 X^2 diagonal.
    const int n = g.n_points;
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = k.c2 * g.x(i) * g.x(i);
    auto lh = [&](const std::vector<std::complex<double>>& in,
                  std::vector<std::complex<double>>& out) {
        const std::complex<double> mi(0.0, -1.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                out[a * n + b] =
                    mi * (h[a] * in[a * n + b] - in[a * n + b] * h[b]);
    };
    std::vector<std::complex<double>> rho = st.rho, k1(rho.size()),
                                      k2(rho.size()), k3(rho.size()),
                                      k4(rho.size()), tmp(rho.size());
    lh(rho, k1);
    for (std::size_t i = 0; i < rho.size(); ++i) tmp[i] = rho[i] + 0.5 * dt * k1[i];
    lh(tmp, k2);
    for (std::size_t i = 0; i < rho.size(); ++i) tmp[i] = rho[i] + 0.5 * dt * k2[i];
    lh(tmp, k3);
    for (std::size_t i = 0; i < rho.size(); ++i) tmp[i] = rho[i] + dt * k3[i];
    lh(tmp, k4);
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        worst = std::max(worst, std::abs(rho[i] - got.state.rho[i]));
        scale = std::max(scale, std::abs(rho[i]));
    }
    CHECK(worst <= 1e-13 * scale);
}

TEST_CASE("grid refinement leaves pure dephasing unchanged") {
    // The Lambda term acts pointwise in (x, x'), so the propagation factor is
    // grid-independent; both resolutions must match the closed form.
    for (int n : {128, 256}) {
        const Grid1D g(n, 1.0);
        const auto st = build_superposition(0.0, 0.6, 0.05, g);
        QbmCoefficients k;
        k.lambda = 2.0;
        const double t_end = 0.5;
        const auto out = evolve(st, k, 1e-3, 500);
        double max_rel = 0.0, peak = 0.0;
        for (const auto& z : st.rho) peak = std::max(peak, std::abs(z));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const auto r0 = st.rho[a * n + b];
                if (std::abs(r0) < 1e-9 * peak) continue;
                const double d = g.x(a) - g.x(b);
                const double factor = std::exp(-k.lambda * d * d * t_end);
                const double rel =
                    std::abs(out.state.rho[a * n + b] - r0 * factor) /
                    (std::abs(r0) * factor);
                max_rel = std::max(max_rel, rel);
            }
        CHECK(max_rel < 1e-6);
    }
}

TEST_CASE("kinetic evolution decays coherence monotonically") {
    const Grid1D g(128, 1.0);
    const double sigma = 0.05, sep = 0.8;
    const auto st = build_superposition(0.0, sep, sigma, g);
    QbmCoefficients k;
    k.lambda = 5.0;
    k.M = 50.0;
    k.include_kinetic = true;
    const auto out = evolve(st, k, 1e-3, 320, 32, sep);
    REQUIRE(out.series.size() > 3);
    for (std::size_t i = 1; i < out.series.size(); ++i)
        CHECK(out.series[i].coherence < out.series[i - 1].coherence);
    CHECK(std::abs(trace(out.state) - 1.0) < 1e-8);
    CHECK(hermiticity_defect(out.state) < 1e-10);
}

TEST_CASE("dissipative stencil preserves trace and Hermiticity") {
    const Grid1D g(128, 1.0);
    const auto st = build_superposition(0.0, 0.5, 0.05, g);
    QbmCoefficients k;
    k.lambda = 1.0;
    k.gamma = 0.05;
    k.M = 50.0;
    k.include_kinetic = true;
    const auto out = evolve(st, k, 5e-4, 500);
    CHECK(std::abs(trace(out.state) - 1.0) < 1e-8);
    CHECK(hermiticity_defect(out.state) < 1e-10);
}

TEST_CASE("stability precondition") {
    const Grid1D g(64, 1.0);
    const auto st = build_superposition(0.0, 0.4, 0.05, g);
    QbmCoefficients k;
    k.lambda = 100.0;
    CHECK_THROWS_MATCHES(evolve(st, k, 1e-2, 10), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::stability_violation;
                         }));
}

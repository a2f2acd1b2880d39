#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wldecoh/error.hpp"

namespace wldecoh {

struct QuadConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;
    double uv_cutoff = 1e3;
    bool cutoff_doubling_check = false;

    void validate() const {
        if (!(rel_tol > 0.0 && abs_tol > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "quadrature tolerances must be > 0");
        if (!(uv_cutoff > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "uv_cutoff must be > 0");
        if (max_subdivisions < 1)
            throw Error(ErrorCode::non_positive_parameter,
                        "max_subdivisions must be >= 1");
    }
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    std::optional<double> cutoff_drift;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights (QUADPACK dqk15).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
    double a, b;
    double value;
    double error;
};

template <class F>
Panel gk15(F&& f, double a, double b, long& evaluations) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double y = f(x);
        ++evaluations;
        if (!std::isfinite(y))
            throw Error(ErrorCode::non_finite_integrand,
                        "integrand not finite at x = " + std::to_string(x));
        return y;
    };
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGK15Nodes[i];
        fv[i] = eval(center - dx);
        fv[14 - i] = eval(center + dx);
    }
    fv[7] = eval(center);

    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double pair = fv[i] + fv[14 - i];
        resk += kGK15WeightsK[i] * pair;
        resabs += kGK15WeightsK[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
        if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * pair;
    }
    resk += kGK15WeightsK[7] * fv[7];
    resabs += kGK15WeightsK[7] * std::abs(fv[7]);
    resg += kGK15WeightsG[3] * fv[7];

    const double mean = 0.5 * resk;
    double resasc = kGK15WeightsK[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kGK15WeightsK[i] *
                  (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    resasc *= std::abs(half);

    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    const double round = eps50 * resabs * std::abs(half);
    if (round > std::numeric_limits<double>::min())
        err = std::max(err, round);
    return Panel{a, b, resk * half, err};
}

// Adaptive GK15 over the seed panels. Worst-error-first bisection with a
// leftmost tie break keeps the subdivision order deterministic; the final
// value re-sums the surviving panels in ascending position so the result is
// independent of the order in which they converged.
template <class F>
QuadResult adapt(F&& f, std::vector<double> breakpoints,
                 const QuadConfig& cfg) {
    cfg.validate();
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                      breakpoints.end());
    QuadResult out;
    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] > breakpoints[i])
            panels.push_back(
                gk15(f, breakpoints[i], breakpoints[i + 1], out.evaluations));
    }
    if (panels.empty())
        throw Error(ErrorCode::invalid_argument, "empty integration domain");

    const double min_width_scale =
        64.0 * std::numeric_limits<double>::epsilon();
    int splits = 0;
    int stall = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (;;) {
        double total = 0.0, err = 0.0;
        for (const Panel& p : panels) { total += p.value; err += p.error; }
        if (err <= std::max(cfg.rel_tol * std::abs(total), cfg.abs_tol)) break;
        // Integrals that cancel to ~0 bottom out at the per-panel roundoff
        // floor; once refinement stops paying, accept the achieved estimate.
        if (err < 0.99 * best_err) {
            best_err = err;
            stall = 0;
        } else if (++stall > 40) {
            break;
        }

        std::size_t worst = panels.size();
        double worst_err = 0.0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            const Panel& p = panels[i];
            const double width_floor =
                min_width_scale *
                std::max({1.0, std::abs(p.a), std::abs(p.b)});
            if (p.b - p.a <= width_floor) continue; // cannot refine further
            if (p.error > worst_err ||
                (p.error == worst_err && worst < panels.size() &&
                 p.a < panels[worst].a)) {
                worst = i;
                worst_err = p.error;
            }
        }
        if (worst == panels.size()) break; // nothing refinable left
        if (++splits > cfg.max_subdivisions)
            throw Error(ErrorCode::max_subdivisions_exceeded,
                        "adaptive quadrature exceeded max_subdivisions = " +
                            std::to_string(cfg.max_subdivisions));
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        panels[worst] = gk15(f, p.a, mid, out.evaluations);
        panels.push_back(gk15(f, mid, p.b, out.evaluations));
    }

    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : panels) {
        out.value += p.value;
        out.error_estimate += p.error;
    }
    return out;
}

inline std::vector<double> geometric_breakpoints(double lo, double hi,
                                                 int levels) {
    std::vector<double> bp;
    bp.push_back(lo);
    for (int k = levels; k >= 0; --k) bp.push_back(hi * std::ldexp(1.0, -k));
    return bp;
}

} // namespace detail

/// Integrates f over [a, b]; optional interior breakpoints seed the panels
/// (used to isolate kinks and PV poles).
template <class F>
QuadResult integrate_finite(F&& f, double a, double b, const QuadConfig& cfg,
                            std::vector<double> interior = {}) {
    if (!(a < b))
        throw Error(ErrorCode::invalid_argument,
                    "integration interval must satisfy a < b");
    std::vector<double> bp{a, b};
    for (double x : interior)
        if (x > a && x < b) bp.push_back(x);
    return detail::adapt(f, std::move(bp), cfg);
}

/// Truncated integral of f over (0, uv_cutoff]. All convergent integrands in
/// this library decay exponentially, so truncation plus the optional doubling
/// check certifies the tail. Geometric seed panels cover twelve decades of
/// dynamic range near the origin before adaptivity takes over.
template <class F>
QuadResult integrate_semi_infinite(F&& f, const QuadConfig& cfg) {
    cfg.validate();
    QuadResult r = detail::adapt(
        f, detail::geometric_breakpoints(0.0, cfg.uv_cutoff, 50), cfg);
    if (cfg.cutoff_doubling_check) {
        QuadResult tail = detail::adapt(
            f, {cfg.uv_cutoff, 1.5 * cfg.uv_cutoff, 2.0 * cfg.uv_cutoff}, cfg);
        r.evaluations += tail.evaluations;
        const double base = std::max(std::abs(r.value),
                                     std::numeric_limits<double>::min());
        r.cutoff_drift = std::abs(tail.value) / base;
    }
    return r;
}

/// Cauchy principal value of Int_a^b f(x)/(x - pole) dx with a < pole < b and
/// f smooth at the pole. Subtraction form: the integrand becomes
/// (f(x) - f(pole))/(x - pole), which is smooth, plus the exact log term.
template <class F>
QuadResult integrate_pv(F&& f, double pole, double a, double b,
                        const QuadConfig& cfg) {
    if (!(a < pole && pole < b))
        throw Error(ErrorCode::pole_outside_interval,
                    "PV pole must lie strictly inside (a, b)");
    const double fp = f(pole);
    if (!std::isfinite(fp))
        throw Error(ErrorCode::non_finite_integrand,
                    "integrand not finite at the PV pole");
    auto g = [&f, fp, pole](double x) { return (f(x) - fp) / (x - pole); };
    QuadResult r = integrate_finite(g, a, b, cfg, {pole});
    r.evaluations += 1;
    r.value += fp * std::log((b - pole) / (pole - a));
    return r;
}

} // namespace wldecoh

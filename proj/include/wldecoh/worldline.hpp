#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "wldecoh/error.hpp"

namespace wldecoh {

enum class WorldlineKind { inertial, hyperbolic, circular };

/// Solves R = v sinh(R) for the positive root, v in (0,1). sinh(R)/R grows
/// monotonically from 1, so the root is unique; the bracket [1e-8, 50] keeps
/// sinh far from overflow. Bracketed Newton with bisection fallback.
inline double solve_r(double v_over_c) {
    if (!(v_over_c > 0.0 && v_over_c < 1.0))
        throw Error(ErrorCode::out_of_range,
                    "v/c must lie strictly inside (0,1), got " +
                        std::to_string(v_over_c));
    const double v = v_over_c;
    double lo = 1e-8, hi = 50.0;
    auto f = [v](double r) { return v * std::sinh(r) - r; };
    // f(lo) < 0 (slope v-1 at the origin), f(hi) > 0 for any v in range.
    double r = (v > 0.9) ? std::sqrt(6.0 * (1.0 / v - 1.0)) : 0.5 * (lo + hi);
    if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);
    double fr = f(r);
    for (int it = 0; it < 200; ++it) {
        if (fr > 0.0) hi = r; else lo = r;
        const double df = v * std::cosh(r) - 1.0;
        double next = (df != 0.0) ? r - fr / df : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - r);
        r = next;
        fr = f(r);
        if (step <= 4.0 * 1e-16 * std::max(1.0, std::abs(r)) && std::abs(fr) <=
            1e-13 * std::max(1.0, r))
            break;
    }
    if (!(std::abs(r - v * std::sinh(r)) < 1e-12 * std::max(1.0, r)))
        throw Error(ErrorCode::not_finite,
                    "solve_r failed to meet the residual tolerance");
    return r;
}

/// Stationary trajectory descriptor (internal units, c = 1). Circular motion
/// carries radius rho and angular frequency xi with v = rho*xi < 1.
class Worldline {
public:
    static Worldline inertial() { return Worldline(WorldlineKind::inertial); }

    static Worldline hyperbolic(double accel) {
        if (!(accel > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "hyperbolic acceleration must be > 0");
        Worldline w(WorldlineKind::hyperbolic);
        w.accel_ = accel;
        return w;
    }

    static Worldline circular(double rho, double xi) {
        if (!(rho > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "circular radius must be > 0");
        if (!(xi > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "circular angular frequency must be > 0");
        if (!(rho * xi < 1.0))
            throw Error(ErrorCode::out_of_range,
                        "circular speed v = rho*xi must be < c");
        Worldline w(WorldlineKind::circular);
        w.rho_ = rho;
        w.xi_ = xi;
        return w;
    }

    WorldlineKind kind() const { return kind_; }
    double accel() const { return accel_; }
    double rho() const { return rho_; }
    double xi() const { return xi_; }

    double v() const {
        return kind_ == WorldlineKind::circular ? rho_ * xi_ : 0.0;
    }

    double gamma() const {
        const double vv = v();
        return 1.0 / std::sqrt(1.0 - vv * vv);
    }

    double proper_acceleration() const {
        switch (kind_) {
        case WorldlineKind::inertial: return 0.0;
        case WorldlineKind::hyperbolic: return accel_;
        case WorldlineKind::circular: return v() * xi_ * gamma();
        }
        return 0.0;
    }

    /// Lab-frame event (t, x, y, z) at proper time tau.
    std::array<double, 4> position(double tau) const {
        switch (kind_) {
        case WorldlineKind::inertial:
            return {tau, 0.0, 0.0, 0.0};
        case WorldlineKind::hyperbolic:
            return {std::sinh(accel_ * tau) / accel_,
                    std::cosh(accel_ * tau) / accel_, 0.0, 0.0};
        case WorldlineKind::circular: {
            const double phase = xi_ * tau * gamma();
            return {tau * gamma(), rho_ * std::sin(phase),
                    rho_ * std::cos(phase), 0.0};
        }
        }
        return {};
    }

private:
    explicit Worldline(WorldlineKind k) : kind_(k) {}

    WorldlineKind kind_;
    double accel_ = 0.0;
    double rho_ = 0.0;
    double xi_ = 0.0;
};

inline const char* to_string(WorldlineKind k) {
    switch (k) {
    case WorldlineKind::inertial: return "inertial";
    case WorldlineKind::hyperbolic: return "hyperbolic";
    case WorldlineKind::circular: return "circular";
    }
    return "?";
}

/// Root and spectral prefactor of the circular Wightman transforms.
struct CircularAux {
    double R;
    double C_of_R;
};

/// C(R) = (xi / 4 pi gamma) / (2 R (v cosh R - 1)) evaluated at the root.
/// At the root v cosh R = sqrt(v^2 + R^2) > 1, so the denominator is
/// positive for every v in (0,1); the guard catches misuse.
inline CircularAux make_circular_aux(const Worldline& w) {
    if (w.kind() != WorldlineKind::circular)
        throw Error(ErrorCode::wrong_kind,
                    "circular auxiliaries need a circular worldline");
    const double v = w.v();
    const double R = solve_r(v);
    const double den = v * std::cosh(R) - 1.0;
    if (!(den > 0.0))
        throw Error(ErrorCode::degenerate_denominator,
                    "v cosh(R) - 1 must be positive");
    const double C = w.xi() / (4.0 * std::numbers::pi * w.gamma()) /
                     (2.0 * R * den);
    return CircularAux{R, C};
}

inline double c_of_r(const Worldline& w) { return make_circular_aux(w).C_of_R; }

} // namespace wldecoh

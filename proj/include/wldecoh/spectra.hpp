#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "wldecoh/error.hpp"
#include "wldecoh/worldline.hpp"

namespace wldecoh {

/// Bose-Einstein occupation n = 1/(exp(w/T) - 1), underflow-safe branches:
/// exponent above 700 returns 0, below 1e-6 uses the Laurent expansion.
inline double bose_einstein(double omega, double temperature) {
    if (omega == 0.0)
        throw Error(ErrorCode::zero_frequency,
                    "Bose occupation undefined at omega = 0");
    if (!(temperature > 0.0))
        throw Error(ErrorCode::non_positive_parameter,
                    "Bose occupation needs T > 0");
    const double x = omega / temperature;
    if (x > 700.0) return 0.0;
    if (x < -700.0) return -1.0;
    if (std::abs(x) < 1e-6) return 1.0 / x - 0.5;
    return 1.0 / std::expm1(x);
}

/// T_DU = hbar a / (2 pi kB c); internal units a / (2 pi).
inline double davies_unruh_temperature(double accel) {
    if (accel < 0.0)
        throw Error(ErrorCode::negative_acceleration,
                    "proper acceleration must be >= 0");
    return accel / (2.0 * std::numbers::pi);
}

/// Forward/backward Wightman transforms D+-(omega) pulled back onto a
/// stationary worldline (internal units).
///
/// The closed forms are stored for omega >= 0 exactly as printed per
/// worldline; negative frequencies are served by the reflection
/// D+(-w) = D-(w) through the same code path, which makes that identity
/// bit-exact. Hyperbolic values are negative (sign kept verbatim), circular
/// positive; only the product and the ratio enter any rate.
class WightmanSpectrum {
public:
    explicit WightmanSpectrum(const Worldline& w) : w_(w) {
        switch (w_.kind()) {
        case WorldlineKind::inertial:
            break;
        case WorldlineKind::hyperbolic:
            t_du_ = davies_unruh_temperature(w_.accel());
            break;
        case WorldlineKind::circular:
            aux_ = make_circular_aux(w_);
            exp_coef_ = 2.0 * aux_->R / (w_.xi() * w_.gamma());
            break;
        }
    }

    const Worldline& worldline() const { return w_; }
    const std::optional<CircularAux>& aux() const { return aux_; }

    /// Davies-Unruh temperature of the hyperbolic worldline (0 for inertial).
    double t_du() const {
        if (w_.kind() == WorldlineKind::circular)
            throw Error(ErrorCode::wrong_kind,
                        "no constant temperature exists for circular motion");
        return t_du_;
    }

    std::pair<double, double> d_pm(double omega) const {
        if (omega < 0.0) {
            const auto [dp, dm] = d_pm_nonneg(-omega);
            return {dm, dp};
        }
        return d_pm_nonneg(omega);
    }

    double d_plus(double omega) const { return d_pm(omega).first; }
    double d_minus(double omega) const { return d_pm(omega).second; }

    /// D+ D-, the only combination entering the decoherence rates;
    /// non-negative on every supported worldline.
    double d_product(double omega) const {
        const auto [dp, dm] = d_pm(omega);
        return dp * dm;
    }

    /// Thermal (vacuum-subtracted) part of D+(w) + D-(w) for w >= 0. This is
    /// the piece that survives in thermal-only dispersion integrals:
    /// hyperbolic -2Kwn(w), circular 2 C(R) exp(-2wR/(xi gamma)), inertial 0.
    double thermal_sum(double omega) const {
        if (omega < 0.0)
            throw Error(ErrorCode::invalid_argument,
                        "thermal_sum is defined for omega >= 0");
        switch (w_.kind()) {
        case WorldlineKind::inertial:
            return 0.0;
        case WorldlineKind::hyperbolic: {
            if (omega == 0.0) return -2.0 * kVacuum * t_du_;
            return -2.0 * kVacuum * omega * bose_einstein(omega, t_du_);
        }
        case WorldlineKind::circular:
            return 2.0 * aux_->C_of_R * std::exp(-exp_coef_ * omega);
        }
        return 0.0;
    }

    /// Frequency-dependent temperature T(w) = w / ln(D-/D+), w > 0.
    /// Vacuum (D+ = 0) maps to 0 by convention; a ratio at or below 1 on a
    /// supported worldline indicates an implementation bug.
    double effective_temperature(double omega) const {
        if (!(omega > 0.0))
            throw Error(ErrorCode::zero_frequency,
                        "effective temperature needs omega > 0");
        const auto [dp, dm] = d_pm(omega);
        if (dp == 0.0) return 0.0;
        const double ratio = dm / dp;
        if (!(ratio > 1.0) || !std::isfinite(ratio))
            throw Error(ErrorCode::detailed_balance_violation,
                        "D-/D+ <= 1 at omega = " + std::to_string(omega));
        return omega / std::log(ratio);
    }

    /// Ultrarelativistic warning for circular motion below v/c = 0.9; the
    /// closed forms are asymptotic in v -> c.
    std::optional<std::string> validity_warning() const {
        if (w_.kind() == WorldlineKind::circular && w_.v() < 0.9)
            return "circular D+- are ultrarelativistic approximations; "
                   "v/c < 0.9 is outside their validity range";
        return std::nullopt;
    }

private:
    // hbar/(2 pi eps0 c^3) in internal units.
    static constexpr double kVacuum = 1.0 / (2.0 * std::numbers::pi);

    std::pair<double, double> d_pm_nonneg(double omega) const {
        switch (w_.kind()) {
        case WorldlineKind::inertial:
            return {0.0, -kVacuum * omega};
        case WorldlineKind::hyperbolic: {
            if (omega == 0.0) {
                // Removable singularity: w n(w) -> T as w -> 0.
                const double v = -kVacuum * t_du_;
                return {v, v};
            }
            const double n = bose_einstein(omega, t_du_);
            return {-kVacuum * omega * n, -kVacuum * omega * (1.0 + n)};
        }
        case WorldlineKind::circular: {
            const double dp = aux_->C_of_R * std::exp(-exp_coef_ * omega);
            return {dp, kVacuum * omega + dp};
        }
        }
        return {0.0, 0.0};
    }

    Worldline w_;
    double t_du_ = 0.0;
    std::optional<CircularAux> aux_;
    double exp_coef_ = 0.0;
};

inline std::pair<double, double> wightman_pm(const Worldline& w,
                                             double omega) {
    return WightmanSpectrum(w).d_pm(omega);
}

inline double effective_temperature(const Worldline& w, double omega) {
    return WightmanSpectrum(w).effective_temperature(omega);
}

} // namespace wldecoh

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "wldecoh/constants.hpp"
#include "wldecoh/error.hpp"
#include "wldecoh/params.hpp"
#include "wldecoh/quadrature.hpp"
#include "wldecoh/response.hpp"
#include "wldecoh/spectra.hpp"

namespace wldecoh {

enum class RateKind { du, td, thermal, gamma, momentum_diffusion };

/// One computed coefficient with its quadrature diagnostics. For the td kind
/// the stored value is the ii-component along the acceleration direction; the
/// full tensor is a_i a_j * value / |a|^2.
struct RateResult {
    RateKind kind;
    double value = 0.0;
    QuadResult quad;
    Worldline worldline = Worldline::inertial();
    ModelParams params{};
    std::optional<std::array<double, 3>> tensor_direction;
    UnitTag unit_system = UnitTag::internal;
};

inline double alpha0_abs2(double omega, const ModelParams& p) {
    const complexd a = alpha0(omega, p);
    return std::norm(a);
}

/// Spectral kernels without their constant prefactors; exposed so tests can
/// check pointwise identities between the integrands.
inline double lambda_du_integrand(const WightmanSpectrum& s,
                                  const ModelParams& p, double omega) {
    const double w2 = omega * omega;
    return w2 * w2 * w2 * alpha0_abs2(omega, p) * s.d_product(omega);
}

inline double lambda_td_integrand(const WightmanSpectrum& s,
                                  const ModelParams& p, double omega) {
    const double w2 = omega * omega;
    const complexd one_minus_2eta = 1.0 - 2.0 * eta(omega, p);
    return w2 * w2 * alpha0_abs2(omega, p) * std::norm(one_minus_2eta) *
           s.d_product(omega);
}

inline double lambda_thermal_integrand(double temperature,
                                       const ModelParams& p, double omega) {
    const double n = bose_einstein(omega, temperature);
    const double w2 = omega * omega;
    return w2 * w2 * w2 * w2 * alpha0_abs2(omega, p) * (n + 1.0) * n;
}

/// Davies-Unruh decoherence: (1 / 6 pi hbar^2 c^2) Int w^6 |a0|^2 D+ D-.
inline RateResult lambda_du(const Worldline& w, const ModelParams& p,
                            const QuadConfig& cfg) {
    const WightmanSpectrum s(w);
    QuadResult q = integrate_semi_infinite(
        [&](double omega) { return lambda_du_integrand(s, p, omega); }, cfg);
    const double pref = 1.0 / (6.0 * std::numbers::pi);
    q.value *= pref;
    q.error_estimate *= pref;
    return RateResult{RateKind::du, q.value, q, w, p, std::nullopt};
}

/// Time-dilation decoherence, ii-component along the acceleration:
/// (a^2 / 6 pi hbar^2 c^2) Int w^4 |a0|^2 |1 - 2 eta|^2 D+ D-.
inline RateResult lambda_td(const Worldline& w, const ModelParams& p,
                            const QuadConfig& cfg) {
    const WightmanSpectrum s(w);
    QuadResult q = integrate_semi_infinite(
        [&](double omega) { return lambda_td_integrand(s, p, omega); }, cfg);
    const double a = w.proper_acceleration();
    const double pref = a * a / (6.0 * std::numbers::pi);
    q.value *= pref;
    q.error_estimate *= pref;
    std::optional<std::array<double, 3>> dir;
    if (a > 0.0) dir = std::array<double, 3>{1.0, 0.0, 0.0};
    return RateResult{RateKind::td, q.value, q, w, p, dir};
}

/// Thermal reference rate of an inertial particle in a heat bath:
/// (1 / 3 (2 pi)^3 eps0^2 c^8) Int w^8 |a0|^2 (n+1) n.
inline RateResult lambda_thermal(double temperature, const ModelParams& p,
                                 const QuadConfig& cfg) {
    if (temperature < 0.0)
        throw Error(ErrorCode::non_positive_parameter,
                    "temperature must be >= 0");
    RateResult r{RateKind::thermal, 0.0, QuadResult{}, Worldline::inertial(),
                 p, std::nullopt};
    if (temperature == 0.0) return r;
    QuadResult q = integrate_semi_infinite(
        [&](double omega) {
            return lambda_thermal_integrand(temperature, p, omega);
        },
        cfg);
    const double two_pi = 2.0 * std::numbers::pi;
    const double pref = 1.0 / (3.0 * two_pi * two_pi * two_pi);
    q.value *= pref;
    q.error_estimate *= pref;
    r.value = q.value;
    r.quad = q;
    return r;
}

/// Fluctuation-dissipation relation 2 M Gamma kB T = hbar^2 Lambda.
inline RateResult gamma_from_fdt(const RateResult& lam, double temperature,
                                 double mass) {
    if (lam.kind != RateKind::du && lam.kind != RateKind::thermal)
        throw Error(ErrorCode::wrong_kind,
                    "gamma_from_fdt needs a du or thermal rate");
    if (!(temperature > 0.0))
        throw Error(ErrorCode::zero_temperature,
                    "gamma_from_fdt needs T > 0");
    if (!(mass > 0.0))
        throw Error(ErrorCode::non_positive_parameter, "mass must be > 0");
    RateResult r = lam;
    r.kind = RateKind::gamma;
    const double scale = 1.0 / (2.0 * mass * temperature);
    r.value = lam.value * scale;
    r.quad.value *= scale;
    r.quad.error_estimate *= scale;
    return r;
}

/// Momentum diffusion <dP^2>/dt = 2 hbar^2 Lambda_DU.
inline RateResult momentum_diffusion(const RateResult& lam_du) {
    if (lam_du.kind != RateKind::du)
        throw Error(ErrorCode::wrong_kind,
                    "momentum_diffusion needs a du rate");
    RateResult r = lam_du;
    r.kind = RateKind::momentum_diffusion;
    r.value = 2.0 * lam_du.value;
    r.quad.value *= 2.0;
    r.quad.error_estimate *= 2.0;
    return r;
}

} // namespace wldecoh

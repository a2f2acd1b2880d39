#pragma once

#include <cmath>
#include <complex>

#include "wldecoh/error.hpp"
#include "wldecoh/params.hpp"

namespace wldecoh {

using complexd = std::complex<double>;

namespace detail {

// Shared denominator -w^2 + 2i beta w^3 + omega_q^2. Vanishes on the real
// axis only for beta = 0, w = +-omega_q; that case is rejected rather than
// regularized so downstream quadrature never sees an infinity.
inline complexd response_denominator(double omega, const ModelParams& p) {
    const complexd den(p.omega_q * p.omega_q - omega * omega,
                       2.0 * p.beta * omega * omega * omega);
    if (den == complexd(0.0, 0.0))
        throw Error(ErrorCode::pole_on_real_axis,
                    "alpha_0 pole on the real axis (beta = 0, omega = +-omega_q)");
    return den;
}

} // namespace detail

/// Bare polarizability alpha_0(omega) = (e^2/m) / (-w^2 + 2i b w^3 + wq^2).
inline complexd alpha0(double omega, const ModelParams& p) {
    return (p.e * p.e / p.m) / detail::response_denominator(omega, p);
}

/// Redshift correction eta(omega) = (2i b w^3 + 2 wq^2) / (same denominator).
inline complexd eta(double omega, const ModelParams& p) {
    const complexd num(2.0 * p.omega_q * p.omega_q,
                       2.0 * p.beta * omega * omega * omega);
    return num / detail::response_denominator(omega, p);
}

/// Red-shifted polarizability alpha_0(w) [1 - eta(w) a_i X^i / c^2], valid
/// while the wavefunction stays well inside c^2/a.
inline complexd alpha_redshifted(double omega, double aX_over_c2,
                                 const ModelParams& p) {
    if (!(std::abs(aX_over_c2) < 1.0))
        throw Error(ErrorCode::superposition_too_large,
                    "|a X / c^2| must be < 1");
    return alpha0(omega, p) * (1.0 - eta(omega, p) * aX_over_c2);
}

/// Dispersion weight S(omega) = 1/2 Re[alpha_0 (eta - 1)].
inline double s_weight(double omega, const ModelParams& p) {
    return 0.5 * std::real(alpha0(omega, p) * (eta(omega, p) - 1.0));
}

} // namespace wldecoh

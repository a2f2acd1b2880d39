#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "wldecoh/error.hpp"
#include "wldecoh/params.hpp"
#include "wldecoh/quadrature.hpp"
#include "wldecoh/rates.hpp"
#include "wldecoh/response.hpp"
#include "wldecoh/spectra.hpp"

namespace wldecoh {

enum class DispersionKind { c1_td, c2_du, c2_td };
enum class DispersionMode { thermal_only, full_with_cutoff };

/// A dispersion-potential coefficient. The vacuum pieces of these integrals
/// are UV-sensitive, so the cutoff is explicit and full-mode results always
/// carry the relative drift observed when the cutoff is doubled. A value is
/// only trustworthy as printed when that drift is small.
struct DispersionResult {
    DispersionKind kind;
    double value = 0.0;
    DispersionMode mode = DispersionMode::thermal_only;
    double uv_cutoff_used = 0.0;
    std::optional<double> cutoff_drift;
    QuadResult quad;
    UnitTag unit_system = UnitTag::internal;
};

inline const char* to_string(DispersionMode m) {
    return m == DispersionMode::thermal_only ? "thermal_only"
                                             : "full_with_cutoff";
}

namespace detail {

inline double relative_drift(double base, double doubled) {
    if (base == 0.0 && doubled == 0.0) return 0.0;
    return std::abs(doubled - base) /
           std::max(std::abs(base), std::numeric_limits<double>::min());
}

} // namespace detail

/// Dispersion force C1_TD = (a / 2 pi c^2) Int_0^inf S(w) w^2 (D+ + D-).
/// thermal_only drops the divergence-prone vacuum part of D+ + D- (the only
/// regularization-free reading); full keeps it, truncated at the cutoff.
inline DispersionResult c1_td(const Worldline& w, const ModelParams& p,
                              const QuadConfig& cfg,
                              DispersionMode mode = DispersionMode::thermal_only) {
    DispersionResult out;
    out.kind = DispersionKind::c1_td;
    out.mode = mode;
    out.uv_cutoff_used = cfg.uv_cutoff;
    const double a = w.proper_acceleration();
    if (a == 0.0) {
        if (mode == DispersionMode::full_with_cutoff) out.cutoff_drift = 0.0;
        return out;
    }
    const WightmanSpectrum s(w);
    QuadConfig local = cfg;
    if (mode == DispersionMode::full_with_cutoff)
        local.cutoff_doubling_check = true;
    auto integrand = [&, mode](double omega) {
        const double sum = mode == DispersionMode::thermal_only
                               ? s.thermal_sum(omega)
                               : s.d_plus(omega) + s.d_minus(omega);
        return s_weight(omega, p) * omega * omega * sum;
    };
    QuadResult q = integrate_semi_infinite(integrand, local);
    const double pref = a / (2.0 * std::numbers::pi);
    q.value *= pref;
    q.error_estimate *= pref;
    out.value = q.value;
    out.cutoff_drift = q.cutoff_drift;
    out.quad = q;
    return out;
}

namespace detail {

// D+(w)D+(w') - D-(w)D-(w'), optionally with the inertial-worldline bracket
// subtracted pointwise (removes the state-independent Lamb-shift piece).
struct C2Bracket {
    const WightmanSpectrum& s;
    bool vacuum_subtract;
    WightmanSpectrum vac{Worldline::inertial()};

    double operator()(double dp_w, double dm_w, double omega,
                      double omega_p) const {
        const auto [dpp, dmp] = s.d_pm(omega_p);
        double br = dp_w * dpp - dm_w * dmp;
        if (vacuum_subtract) {
            const auto [vp, vm] = vac.d_pm(omega);
            const auto [vpp, vmp] = vac.d_pm(omega_p);
            br -= vp * vpp - vm * vmp;
        }
        return br;
    }
};

// Inner PV integral over w' in [-cut, cut] with the pole at -w. The
// integrand kinks at w' = 0 (vacuum step), so the domain is split there and
// the PV subtraction runs on the half containing the pole.
template <class G>
double c2_inner(G&& g, double pole, double cut, const QuadConfig& cfg,
                long& evaluations) {
    auto ratio = [&g, pole](double x) { return g(x) / (x - pole); };
    QuadResult r;
    if (pole == 0.0) {
        r = integrate_pv(g, pole, -cut, cut, cfg);
    } else if (pole < 0.0) {
        r = integrate_pv(g, pole, -cut, 0.0, cfg);
        const QuadResult right = integrate_finite(ratio, 0.0, cut, cfg);
        r.value += right.value;
        r.evaluations += right.evaluations;
    } else {
        r = integrate_pv(g, pole, 0.0, cut, cfg);
        const QuadResult left = integrate_finite(ratio, -cut, 0.0, cfg);
        r.value += left.value;
        r.evaluations += left.evaluations;
    }
    evaluations += r.evaluations;
    return r.value;
}

enum class C2Weight { du, td };

// One full PV double integral at a given cutoff (without prefactor).
inline QuadResult c2_double_integral(const WightmanSpectrum& s,
                                     const ModelParams& p, C2Weight weight,
                                     bool vacuum_subtract, double cut,
                                     const QuadConfig& cfg) {
    C2Bracket bracket{s, vacuum_subtract};
    long inner_evals = 0;
    auto outer = [&](double omega) {
        const auto [dp_w, dm_w] = s.d_pm(omega);
        double outer_weight;
        if (weight == C2Weight::du) {
            const double w2 = omega * omega;
            outer_weight = w2 * w2 * alpha0_abs2(omega, p);
        } else {
            const double w2 = omega * omega;
            const complexd redshift =
                alpha0(omega, p) * (eta(omega, p) - 1.0);
            outer_weight = w2 * w2 * std::norm(redshift);
        }
        if (outer_weight == 0.0) return 0.0;
        auto g = [&](double omega_p) {
            const double wgt =
                weight == C2Weight::du ? omega_p * omega_p : 1.0;
            return wgt * bracket(dp_w, dm_w, omega, omega_p);
        };
        return outer_weight * c2_inner(g, -omega, cut, cfg, inner_evals);
    };
    QuadResult q = integrate_finite(outer, -cut, cut, cfg, {0.0});
    q.evaluations += inner_evals;
    return q;
}

inline DispersionResult c2_common(const Worldline& w, const ModelParams& p,
                                  const QuadConfig& cfg, C2Weight weight,
                                  bool vacuum_subtract, DispersionKind kind,
                                  double prefactor) {
    const WightmanSpectrum s(w);
    QuadResult base =
        c2_double_integral(s, p, weight, vacuum_subtract, cfg.uv_cutoff, cfg);
    QuadResult doubled = c2_double_integral(s, p, weight, vacuum_subtract,
                                            2.0 * cfg.uv_cutoff, cfg);
    DispersionResult out;
    out.kind = kind;
    out.mode = DispersionMode::full_with_cutoff;
    out.uv_cutoff_used = cfg.uv_cutoff;
    out.value = prefactor * base.value;
    out.cutoff_drift = relative_drift(base.value, doubled.value);
    out.quad = base;
    out.quad.value = out.value;
    out.quad.error_estimate = std::abs(prefactor) * base.error_estimate;
    out.quad.evaluations = base.evaluations + doubled.evaluations;
    out.quad.cutoff_drift = out.cutoff_drift;
    return out;
}

} // namespace detail

/// Lamb-shift-like term: C2_DU = -(1 / 24 pi^2 hbar c^2) P IInt dw dw'
/// w^4 w'^2 / (w + w') |a0(w)|^2 [D+(w)D+(w') - D-(w)D-(w')].
/// Finite at every finite cutoff; not expected to converge as the cutoff
/// grows, which is what the reported drift quantifies.
inline DispersionResult c2_du(const Worldline& w, const ModelParams& p,
                              const QuadConfig& cfg,
                              bool vacuum_subtract = false) {
    const double pi = std::numbers::pi;
    return detail::c2_common(w, p, cfg, detail::C2Weight::du, vacuum_subtract,
                             DispersionKind::c2_du,
                             -1.0 / (24.0 * pi * pi));
}

/// Thermal-gradient term: C2_TD = -(a^2 / 32 pi^2 hbar c^4) P IInt dw dw'
/// w^4 / (w + w') |a0(w)(eta(w)-1)|^2 [D+(w)D+(w') - D-(w)D-(w')].
inline DispersionResult c2_td(const Worldline& w, const ModelParams& p,
                              const QuadConfig& cfg,
                              bool vacuum_subtract = false) {
    const double a = w.proper_acceleration();
    if (a == 0.0) {
        DispersionResult out;
        out.kind = DispersionKind::c2_td;
        out.mode = DispersionMode::full_with_cutoff;
        out.uv_cutoff_used = cfg.uv_cutoff;
        out.cutoff_drift = 0.0;
        return out;
    }
    const double pi = std::numbers::pi;
    return detail::c2_common(w, p, cfg, detail::C2Weight::td, vacuum_subtract,
                             DispersionKind::c2_td,
                             -a * a / (32.0 * pi * pi));
}

/// Kernel factors exposed for pointwise identity checks between the DU and
/// TD double integrands.
inline double c2_kernel_du(const WightmanSpectrum& s, const ModelParams& p,
                           double omega, double omega_p) {
    const double w2 = omega * omega;
    const auto [dp_w, dm_w] = s.d_pm(omega);
    const auto [dpp, dmp] = s.d_pm(omega_p);
    return w2 * w2 * alpha0_abs2(omega, p) * omega_p * omega_p *
           (dp_w * dpp - dm_w * dmp) / (omega + omega_p);
}

inline double c2_kernel_td(const WightmanSpectrum& s, const ModelParams& p,
                           double omega, double omega_p) {
    const double w2 = omega * omega;
    const complexd redshift = alpha0(omega, p) * (eta(omega, p) - 1.0);
    const auto [dp_w, dm_w] = s.d_pm(omega);
    const auto [dpp, dmp] = s.d_pm(omega_p);
    return w2 * w2 * std::norm(redshift) * (dp_w * dpp - dm_w * dmp) /
           (omega + omega_p);
}

} // namespace wldecoh

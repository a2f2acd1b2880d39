#pragma once

#include <cmath>
#include <string>

#include "wldecoh/error.hpp"

namespace wldecoh {

/// Fundamental constants of the active unit system. All library kernels run
/// in the internal system (every field exactly 1, frequencies in units of
/// omega_q); the SI instance exists for conversion at the CLI boundary.
struct PhysicalConstants {
    double hbar;
    double c;
    double eps0;
    double kB;

    static PhysicalConstants internal() { return {1.0, 1.0, 1.0, 1.0}; }

    static PhysicalConstants si() {
        return {1.054571817e-34, 299792458.0, 8.8541878128e-12, 1.380649e-23};
    }

    void validate() const {
        if (!(hbar > 0.0 && c > 0.0 && eps0 > 0.0 && kB > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "physical constants must be strictly positive");
    }
};

enum class UnitTag { internal, si };

inline const char* to_string(UnitTag u) {
    return u == UnitTag::internal ? "internal" : "si";
}

enum class Dimension {
    frequency,
    time,
    length,
    velocity,
    acceleration,
    temperature,
    mass,
    energy,
    charge,
    polarizability,
    rate_lambda,        // 1/(length^2 time)
    rate_gamma,         // 1/time
    momentum_diffusion, // momentum^2/time
    force_c1,           // hbar/(length time)
    curvature_c2,       // hbar/(length^2 time)
    wightman,           // hbar * frequency / (eps0 c^3)
    dimensionless,
};

/// Nondimensionalization relative to hbar = c = eps0 = kB = 1 with the
/// frequency unit set by `omega_scale` (SI rad/s). `si_factor` returns the
/// SI value of one internal unit of the given dimension.
class UnitSystem {
public:
    explicit UnitSystem(double omega_scale_si) : scale_(omega_scale_si) {
        if (!(scale_ > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "frequency scale must be positive");
    }

    double omega_scale() const { return scale_; }

    double si_factor(Dimension d) const {
        const PhysicalConstants k = PhysicalConstants::si();
        const double w = scale_;
        switch (d) {
        case Dimension::frequency: return w;
        case Dimension::time: return 1.0 / w;
        case Dimension::length: return k.c / w;
        case Dimension::velocity: return k.c;
        case Dimension::acceleration: return k.c * w;
        case Dimension::temperature: return k.hbar * w / k.kB;
        case Dimension::mass: return k.hbar * w / (k.c * k.c);
        case Dimension::energy: return k.hbar * w;
        case Dimension::charge: return std::sqrt(k.eps0 * k.hbar * k.c);
        case Dimension::polarizability:
            return k.eps0 * k.c * k.c * k.c / (w * w * w);
        case Dimension::rate_lambda: return w * w * w / (k.c * k.c);
        case Dimension::rate_gamma: return w;
        case Dimension::momentum_diffusion: {
            const double p = k.hbar * w / k.c;
            return p * p * w;
        }
        case Dimension::force_c1: return k.hbar * w * w / k.c;
        case Dimension::curvature_c2: return k.hbar * w * w * w / (k.c * k.c);
        case Dimension::wightman: return k.hbar * w / (k.eps0 * k.c * k.c * k.c);
        case Dimension::dimensionless: return 1.0;
        }
        throw Error(ErrorCode::unknown_dimension_tag, "unknown dimension tag");
    }

    double to_internal(double si_value, Dimension d) const {
        return si_value / si_factor(d);
    }

    double from_internal(double internal_value, Dimension d) const {
        return internal_value * si_factor(d);
    }

private:
    double scale_;
};

inline Dimension dimension_from_string(const std::string& s) {
    if (s == "frequency") return Dimension::frequency;
    if (s == "time") return Dimension::time;
    if (s == "length") return Dimension::length;
    if (s == "velocity") return Dimension::velocity;
    if (s == "acceleration") return Dimension::acceleration;
    if (s == "temperature") return Dimension::temperature;
    if (s == "mass") return Dimension::mass;
    if (s == "energy") return Dimension::energy;
    if (s == "charge") return Dimension::charge;
    if (s == "polarizability") return Dimension::polarizability;
    if (s == "rate_lambda") return Dimension::rate_lambda;
    if (s == "rate_gamma") return Dimension::rate_gamma;
    if (s == "momentum_diffusion") return Dimension::momentum_diffusion;
    if (s == "force_c1") return Dimension::force_c1;
    if (s == "curvature_c2") return Dimension::curvature_c2;
    if (s == "wightman") return Dimension::wightman;
    if (s == "dimensionless") return Dimension::dimensionless;
    throw Error(ErrorCode::unknown_dimension_tag,
                "unknown dimension tag: " + s);
}

} // namespace wldecoh

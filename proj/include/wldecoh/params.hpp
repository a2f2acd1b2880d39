#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "wldecoh/constants.hpp"
#include "wldecoh/error.hpp"

namespace wldecoh {

/// Internal-oscillator and mass parameters. `beta` is always derived from
/// (e, m); it is the radiation-damping time e^2/(8 pi m c^3 eps0).
struct ModelParams {
    double e;
    double m;
    double omega_q;
    double M;
    double beta;
};

/// Weak-damping guard: the omega^3 pole of alpha_0 in the upper half plane
/// stays numerically irrelevant only while beta*omega_q is small.
inline constexpr double kMaxBetaOmegaQ = 0.1;

inline ModelParams build_params(double e, double m, double omega_q, double M,
                                const PhysicalConstants& k = PhysicalConstants::internal()) {
    if (!(m > 0.0))
        throw Error(ErrorCode::non_positive_parameter, "m must be > 0");
    if (!(omega_q > 0.0))
        throw Error(ErrorCode::non_positive_parameter, "omega_q must be > 0");
    if (!(M > 0.0))
        throw Error(ErrorCode::non_positive_parameter, "M must be > 0");
    const double beta =
        e * e / (8.0 * std::numbers::pi * m * k.c * k.c * k.c * k.eps0);
    if (!(beta * omega_q < kMaxBetaOmegaQ))
        throw Error(ErrorCode::damping_too_large,
                    "beta*omega_q = " + std::to_string(beta * omega_q) +
                        " violates the weak-damping regime (< 0.1)");
    return ModelParams{e, m, omega_q, M, beta};
}

/// Values read from a flat key=value config file. Recognized keys:
/// e, m, omega_q, M, unit_system. Anything else is an error.
struct ConfigValues {
    std::optional<double> e;
    std::optional<double> m;
    std::optional<double> omega_q;
    std::optional<double> M;
    std::optional<UnitTag> unit_system;
};

inline ConfigValues parse_config(std::istream& in) {
    ConfigValues cfg;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::bad_config_line,
                        "config line " + std::to_string(lineno) +
                            ": expected key=value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        auto parse_double = [&](const std::string& v) {
            std::size_t pos = 0;
            double x = 0;
            try {
                x = std::stod(v, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != v.size())
                throw Error(ErrorCode::bad_config_line,
                            "config line " + std::to_string(lineno) +
                                ": bad numeric value '" + v + "'");
            return x;
        };
        if (key == "e") cfg.e = parse_double(val);
        else if (key == "m") cfg.m = parse_double(val);
        else if (key == "omega_q") cfg.omega_q = parse_double(val);
        else if (key == "M") cfg.M = parse_double(val);
        else if (key == "unit_system") {
            if (val == "internal") cfg.unit_system = UnitTag::internal;
            else if (val == "si") cfg.unit_system = UnitTag::si;
            else
                throw Error(ErrorCode::bad_config_line,
                            "config line " + std::to_string(lineno) +
                                ": unit_system must be internal or si");
        } else
            throw Error(ErrorCode::unknown_config_key,
                        "unknown config key '" + key + "' on line " +
                            std::to_string(lineno));
    }
    return cfg;
}

inline ConfigValues load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::invalid_argument,
                    "cannot open config file: " + path);
    return parse_config(in);
}

} // namespace wldecoh

#pragma once

#include <stdexcept>
#include <string>

namespace wldecoh {

enum class ErrorCode {
    non_positive_parameter,
    damping_too_large,
    unknown_dimension_tag,
    unknown_config_key,
    bad_config_line,
    pole_on_real_axis,
    superposition_too_large,
    out_of_range,
    degenerate_denominator,
    not_finite,
    zero_frequency,
    negative_acceleration,
    detailed_balance_violation,
    max_subdivisions_exceeded,
    non_finite_integrand,
    pole_outside_interval,
    zero_temperature,
    wrong_kind,
    grid_too_small,
    stability_violation,
    non_finite_state,
    invalid_argument,
};

/// Library exception. `is_validation()` separates bad user input from
/// numerical failures; the CLI maps the former to exit 2, the latter to 3.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const { return code_; }

    bool is_validation() const {
        switch (code_) {
        case ErrorCode::not_finite:
        case ErrorCode::detailed_balance_violation:
        case ErrorCode::max_subdivisions_exceeded:
        case ErrorCode::non_finite_integrand:
        case ErrorCode::non_finite_state:
            return false;
        default:
            return true;
        }
    }

private:
    ErrorCode code_;
};

} // namespace wldecoh

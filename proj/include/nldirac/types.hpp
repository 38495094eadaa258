#pragma once

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nldirac {

using Real = double;
using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr Real pi = 3.141592653589793238462643383279502884;

enum class ErrorCode {
    invalid_field,
    invalid_grid,
    parameter,
    configuration,
    near_singular,
    singular_power,
    undefined_splitting,
    undefined_scaling,
    numerical,
    divergence,
    degenerate_form,
    degenerate_pairing,
    parse,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_field: return "invalid-field";
        case ErrorCode::invalid_grid: return "invalid-grid";
        case ErrorCode::parameter: return "parameter";
        case ErrorCode::configuration: return "configuration";
        case ErrorCode::near_singular: return "near-singular";
        case ErrorCode::singular_power: return "singular-power";
        case ErrorCode::undefined_splitting: return "undefined-splitting";
        case ErrorCode::undefined_scaling: return "undefined-scaling";
        case ErrorCode::numerical: return "numerical";
        case ErrorCode::divergence: return "divergence";
        case ErrorCode::degenerate_form: return "degenerate-form";
        case ErrorCode::degenerate_pairing: return "degenerate-pairing";
        case ErrorCode::parse: return "parse";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + " error: " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nldirac

#pragma once

// Exponents, the constant kappa and the sufficient conditions for the
// iteration to contract, evaluated exactly as plain arithmetic.

#include "nldirac/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nldirac {

struct AnalyticConstants {
    int n = 2;
    std::optional<Real> p;  // defaults to 2n/(n-1)
    std::optional<Real> p_A;  // defaults to the lower end of the admissible window
    Real c_h = 1.0;
    Real C_h = 1.0;
    Real c1 = 1.0;
    Real c_half = 1.0;
    Real K_GN = 1.0;
    Real K_GN2 = 1.0;
    Real K_FGN = 1.0;
    Real lambda_abs = 0.0;
    Real lambda1_abs = 1.0;
    Real Dg_L2 = 0.0;
    Real g_L2T = 0.0;
    Real g_H1T = 0.0;
    Real Xi = 1.0;
    Real Lambda_cap = 1.0;

    Real effective_p() const;
    Real effective_p_A() const;
};

/// Admissible Hoelder split [max(2, n(p-2)), 2n/(n-2)]; the upper end is infinite for n = 2.
std::pair<Real, Real> p_A_window(int n, Real p);

struct Exponents {
    Real p = 0.0;
    Real p_A = 0.0;
    Real theta_A = 0.0;
    Real theta_B = 0.0;
    Real p_B = 0.0;
    Real q = 0.0;  // 2n/(n+1)
    Real kappa = 0.0;
};

Exponents derive_exponents(const AnalyticConstants& c);

enum class ConditionMode { C_final, B_explicit, A_raw };

const char* to_string(ConditionMode mode);

struct ConditionResult {
    std::string name;
    Real lhs = 0.0;
    Real rhs = 0.0;
    bool strict = false;
    bool satisfied = false;
};

struct ConditionReport {
    ConditionMode mode = ConditionMode::C_final;
    Exponents exponents;
    std::vector<ConditionResult> conditions;
    Real A = 0.0;  // |lambda_1|^{-1}
    Real B = 0.0;
    Real epsilon = 0.0;
    Real contraction_bound = 0.0;  // sqrt(2) B / (1 - A), infinite when epsilon <= 0

    bool all_satisfied() const;
    const ConditionResult& at(const std::string& name) const;
};

ConditionReport check_conditions(const AnalyticConstants& c, ConditionMode mode);

/// Largest |lambda|/|lambda_1| allowed by (C3): 1 / (kappa 2^{3/2} 3^{theta_B}).
Real c3_threshold_ratio(const AnalyticConstants& c);

}  // namespace nldirac

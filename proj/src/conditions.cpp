#include "nldirac/conditions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nldirac {
namespace {

void require_positive(Real v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::parameter, std::string(name) + " must be positive");
}

void require_nonnegative(Real v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::parameter, std::string(name) + " must be >= 0");
}

void validate(const AnalyticConstants& c) {
    if (c.n < 2) throw Error(ErrorCode::parameter, "dimension parameter n must be >= 2");
    require_positive(c.c_h, "c_h");
    require_positive(c.C_h, "C_h");
    require_positive(c.c1, "c1");
    require_positive(c.c_half, "c_half");
    require_positive(c.K_GN, "K_GN");
    require_positive(c.K_GN2, "K_GN2");
    require_positive(c.K_FGN, "K_FGN");
    require_positive(c.lambda1_abs, "lambda1_abs");
    require_positive(c.Xi, "Xi");
    require_positive(c.Lambda_cap, "Lambda_cap");
    require_nonnegative(c.lambda_abs, "lambda_abs");
    require_nonnegative(c.Dg_L2, "Dg_L2");
    require_nonnegative(c.g_L2T, "g_L2T");
    require_nonnegative(c.g_H1T, "g_H1T");
}

ConditionResult make(std::string name, Real lhs, Real rhs, bool strict) {
    const bool ok = strict ? lhs < rhs : lhs <= rhs;
    return {std::move(name), lhs, rhs, strict, ok};
}

}  // namespace

Real AnalyticConstants::effective_p() const {
    if (p) return *p;
    if (n < 2) throw Error(ErrorCode::parameter, "dimension parameter n must be >= 2");
    return 2.0 * n / (n - 1.0);
}

Real AnalyticConstants::effective_p_A() const {
    if (p_A) return *p_A;
    return p_A_window(n, effective_p()).first;
}

std::pair<Real, Real> p_A_window(int n, Real p) {
    const Real lo = std::max(2.0, n * (p - 2.0));
    const Real hi = n == 2 ? std::numeric_limits<Real>::infinity() : 2.0 * n / (n - 2.0);
    return {lo, hi};
}

Exponents derive_exponents(const AnalyticConstants& c) {
    validate(c);
    const Real n = c.n;
    Exponents e;
    e.p = c.effective_p();
    if (!(e.p >= 2.0) || !std::isfinite(e.p)) throw Error(ErrorCode::parameter, "exponent p must be >= 2");
    e.p_A = c.effective_p_A();
    const auto [lo, hi] = p_A_window(c.n, e.p);
    if (!(e.p_A >= lo && e.p_A <= hi) || !std::isfinite(e.p_A)) {
        std::ostringstream msg;
        msg << "p_A = " << e.p_A << " outside the admissible window [" << lo << ", " << hi << "]";
        throw Error(ErrorCode::parameter, msg.str());
    }
    e.theta_A = n / 2.0 - n / e.p_A;
    e.theta_B = n * (e.p - 2.0) / e.p_A;
    if (e.theta_A < 0.0 || e.theta_A > 1.0 || e.theta_B < 0.0 || e.theta_B > 1.0) {
        throw Error(ErrorCode::parameter, "interpolation exponents leave [0,1]");
    }
    e.p_B = 2.0 * e.p_A / (e.p_A - e.p + 2.0);
    e.q = 2.0 * n / (n + 1.0);
    e.kappa = 2.0 * (e.p - 1.0) * std::pow(c.c_h, -2.0 / (n - 1.0) - 2.0) *
              std::pow(c.C_h, 2.0 * (1.0 - e.theta_B)) * std::pow(c.c_half, e.theta_B) *
              std::pow(c.K_GN2, 2.0 / (n - 1.0)) * c.K_FGN * c.K_FGN;
    return e;
}

const char* to_string(ConditionMode mode) {
    switch (mode) {
        case ConditionMode::C_final: return "C_final";
        case ConditionMode::B_explicit: return "B_explicit";
        case ConditionMode::A_raw: return "A_raw";
    }
    return "unknown";
}

bool ConditionReport::all_satisfied() const {
    for (const auto& c : conditions) {
        if (!c.satisfied) return false;
    }
    return true;
}

const ConditionResult& ConditionReport::at(const std::string& name) const {
    for (const auto& c : conditions) {
        if (c.name == name) return c;
    }
    throw Error(ErrorCode::parameter, "no condition named " + name);
}

ConditionReport check_conditions(const AnalyticConstants& c, ConditionMode mode) {
    ConditionReport r;
    r.mode = mode;
    r.exponents = derive_exponents(c);
    const Exponents& e = r.exponents;
    const Real n = c.n;
    const Real inv = 1.0 / c.lambda1_abs;
    // Nonlinear source term |lambda| (c_h^{-1} K_GN)^{(n+1)/(n-1)}, times Xi^{1/(n-1)} Lambda^{n/(n-1)}.
    const Real G = c.lambda_abs * std::pow(c.K_GN / c.c_h, (n + 1.0) / (n - 1.0));
    const Real X = std::pow(c.Xi, 1.0 / (n - 1.0)) * std::pow(c.Lambda_cap, n / (n - 1.0));
    const Real caps = std::pow(c.Xi, 2.0 * (1.0 - e.theta_A) / (n - 1.0)) *
                      std::pow(c.Lambda_cap, 2.0 * e.theta_A / (n - 1.0));
    const Real sqrt_c1 = std::sqrt(c.c1);

    r.A = inv;
    r.epsilon = 1.0 - inv;
    r.B = e.kappa * caps * c.lambda_abs * std::pow(inv, 1.0 - e.theta_B);
    r.contraction_bound = r.epsilon > 0.0 ? std::sqrt(2.0) * r.B / r.epsilon : std::numeric_limits<Real>::infinity();

    switch (mode) {
        case ConditionMode::A_raw:
            r.conditions.push_back(make("A1_L2", c.g_L2T, c.Xi, false));
            r.conditions.push_back(make("A1_H1", c.g_H1T, c.Lambda_cap, false));
            r.conditions.push_back(make("A2", c.C_h * inv * (G * X + c.Dg_L2) + c.g_L2T, c.Xi, false));
            r.conditions.push_back(make("A3", sqrt_c1 * (1.0 + inv) * (G * X + c.Dg_L2) + c.g_H1T, c.Lambda_cap, false));
            if (r.epsilon > 0.0) {
                r.conditions.push_back(make("A4", r.B, r.epsilon / std::sqrt(2.0), true));
            } else {
                r.conditions.push_back({"A4", r.B, r.epsilon / std::sqrt(2.0), true, false});
            }
            break;
        case ConditionMode::B_explicit:
            r.conditions.push_back(make("B1", c.C_h * inv * (G * X + c.Dg_L2) + c.g_L2T, c.Xi, false));
            r.conditions.push_back(make("B2", 3.0 * sqrt_c1 * inv * (G * X + c.Dg_L2) + c.g_H1T, c.Lambda_cap, false));
            r.conditions.push_back(make("B3", e.kappa * std::pow(2.0, e.theta_B) * caps * c.lambda_abs * inv,
                                        std::sqrt(2.0) / 4.0, true));
            break;
        case ConditionMode::C_final:
            r.conditions.push_back(make("C1", c.C_h * inv * (G + c.Dg_L2) + c.g_L2T, 1.0, false));
            r.conditions.push_back(make("C2", 4.0 * sqrt_c1 * inv * (G + c.Dg_L2) + c.g_H1T, 1.0, false));
            r.conditions.push_back(make("C3",
                                        e.kappa * std::pow(2.0, 1.5) * std::pow(3.0, e.theta_B) * c.lambda_abs * inv,
                                        1.0, true));
            break;
    }
    return r;
}

Real c3_threshold_ratio(const AnalyticConstants& c) {
    const Exponents e = derive_exponents(c);
    return 1.0 / (e.kappa * std::pow(2.0, 1.5) * std::pow(3.0, e.theta_B));
}

}  // namespace nldirac

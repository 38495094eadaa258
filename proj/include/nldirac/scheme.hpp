#pragma once

// Fixed-point iteration for D u = lambda |u|^{p-2} u with P u = P g.
//
// One step solves the linear problem
//   (R D_P - a) w = Proj( R lambda N(u_k) - a (u_k - g) - R D g ),
//   u_{k+1} = g + w,
// in constrained coordinates, where N(u) = |u|^{p-2} u and Proj is the
// quadrature-orthogonal projection onto the kernel of P. True solutions are
// fixed points for every admissible a and R.

#include "nldirac/assembly.hpp"
#include "nldirac/fields.hpp"
#include "nldirac/spectral.hpp"

#include <optional>
#include <vector>

namespace nldirac {

struct SchemeConfig {
    explicit SchemeConfig(SpinorField datum) : g(std::move(datum)) {}

    Complex lambda = 0.0;
    Real p = 2.0;
    SpinorField g;
    Complex a = 0.0;
    Real R = 1.0;
    bool R_auto = false;  // R = 2 / |lambda_1|
    std::optional<SpinorField> f0;
    Real xi = 1.0;
    Real lambda_cap = 1.0;
    int max_iter = 200;
    Real tol_cauchy = 1e-12;
    Real tol_residual = 1e-7;
};

void validate(const SchemeConfig& cfg);

/// R with `auto` resolved against the spectrum.
Real effective_R(const SpectralData& spec, const SchemeConfig& cfg);

struct IterationState {
    int k = 0;
    SpinorField u;
    SpinorField u_tilde;  // u - g
    Real delta_norm_H12D = 0.0;
    Real l2t_norm = 0.0;
    Real h1t_norm = 0.0;
    Real pde_residual = 0.0;
};

enum class Verdict { converged, max_iter_exceeded, diverged, bound_violated };

const char* to_string(Verdict v);

struct IterationReport {
    std::vector<IterationState> states;
    std::vector<Real> ratios;
    Verdict verdict = Verdict::max_iter_exceeded;
    Real pde_residual = 0.0;
    Real pde_residual_pointwise = 0.0;
    Real boundary_residual = 0.0;
    bool bounds_held = true;

    int iterations() const noexcept { return static_cast<int>(states.size()); }
    Real max_ratio() const;
    const SpinorField& solution() const;
};

struct SolutionCheck {
    Real pde_residual = 0.0;            // projected onto the constraint space
    Real pde_residual_pointwise = 0.0;  // full grid L^2 norm
    Real boundary_residual = 0.0;
};

/// One iteration from `u_k`. Non-finite results raise a divergence error.
SpinorField step(const SpectralData& spec, const SchemeConfig& cfg, const SpinorField& u_k);

IterationReport run(const SpectralData& spec, const SchemeConfig& cfg);

/// Remark-2 rescaling: lambda -> alpha lambda, fields and caps -> alpha^{1/(2-p)} times.
SchemeConfig scale_problem(const SchemeConfig& cfg, Real alpha);

SolutionCheck verify_solution(const SpectralData& spec, const SchemeConfig& cfg, const SpinorField& u);

}  // namespace nldirac

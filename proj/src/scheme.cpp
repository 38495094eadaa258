#include "nldirac/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nldirac {
namespace {

struct StepContext {
    const SpectralData& spec;
    const SchemeConfig& cfg;
    Real R;
    SpinorField::Values Dg;
};

StepContext prepare(const SpectralData& spec, const SchemeConfig& cfg) {
    validate(cfg);
    const AssembledOperator& op = spec.op();
    if (!(cfg.g.grid() == op.grid()) || cfg.g.rank() != op.rank()) {
        throw Error(ErrorCode::invalid_field, "datum g does not match the model grid or rank");
    }
    return {spec, cfg, effective_R(spec, cfg), apply_D(op.spec(), cfg.g).values()};
}

SpinorField::Values power_values(const SpinorField::Values& u, Real p) {
    SpinorField::Values out = u;
    if (p == 2.0) return out;
    const Eigen::VectorXd mod = u.rowwise().norm();
    for (Index i = 0; i < u.rows(); ++i) {
        if (mod(i) == 0.0) {
            out.row(i).setZero();
        } else {
            out.row(i) *= std::pow(mod(i), p - 2.0);
        }
    }
    return out;
}

// Constrained coordinates of u_{k+1} - g.
VectorXc step_coords(const StepContext& ctx, const SpinorField& u_k) {
    const SchemeConfig& cfg = ctx.cfg;
    u_k.require_compatible(cfg.g);
    SpinorField::Values rhs = (ctx.R * cfg.lambda) * power_values(u_k.values(), cfg.p) - ctx.R * ctx.Dg;
    if (cfg.a != Complex(0.0)) rhs -= cfg.a * (u_k.values() - cfg.g.values());
    if (!rhs.allFinite()) throw Error(ErrorCode::divergence, "iterate overflowed");
    const AssembledOperator& op = ctx.spec.op();
    VectorXc coords = op.project(SpinorField(op.grid(), std::move(rhs)));
    coords = ctx.spec.apply_inverse(VectorXc(coords / ctx.R), cfg.a / ctx.R);
    if (!coords.allFinite()) throw Error(ErrorCode::divergence, "iterate became non-finite");
    return coords;
}

SpinorField embed_with_datum(const StepContext& ctx, const VectorXc& coords) {
    SpinorField::Values v = ctx.spec.op().embed(coords).values() + ctx.cfg.g.values();
    if (!v.allFinite()) throw Error(ErrorCode::divergence, "iterate became non-finite");
    return SpinorField(ctx.cfg.g.grid(), std::move(v));
}

SpinorField residual_field(const SpectralData& spec, const SchemeConfig& cfg, const SpinorField& u) {
    const SpinorField du = apply_D(spec.op().spec(), u);
    return SpinorField(u.grid(), du.values() - cfg.lambda * power_values(u.values(), cfg.p));
}

// H^{1/2}_D graph norm; the weight 1 + |lambda_k| stays defined with zero modes.
Real half_graph_norm(const SpectralData& spec, const VectorXc& coords) {
    const Eigen::VectorXd coeff2 = (spec.eigenvectors().adjoint() * coords).cwiseAbs2();
    return std::sqrt(coeff2.dot((1.0 + spec.eigenvalues().cwiseAbs().array()).matrix()));
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::converged: return "converged";
        case Verdict::max_iter_exceeded: return "max_iter_exceeded";
        case Verdict::diverged: return "diverged";
        case Verdict::bound_violated: return "bound_violated";
    }
    return "unknown";
}

void validate(const SchemeConfig& cfg) {
    if (!(cfg.p >= 2.0) || !std::isfinite(cfg.p)) throw Error(ErrorCode::parameter, "scheme.p must be >= 2");
    if (!(cfg.tol_cauchy > 0.0) || !(cfg.tol_residual > 0.0)) {
        throw Error(ErrorCode::parameter, "scheme tolerances must be positive");
    }
    if (cfg.max_iter < 1) throw Error(ErrorCode::parameter, "scheme.max_iter must be >= 1");
    if (!cfg.R_auto && !(cfg.R > 0.0)) throw Error(ErrorCode::parameter, "scheme.R must be positive");
    if (!(cfg.xi > 0.0) || !(cfg.lambda_cap > 0.0)) {
        throw Error(ErrorCode::parameter, "scheme.xi and scheme.lambda_cap must be positive");
    }
    if (!std::isfinite(std::abs(cfg.lambda)) || !std::isfinite(std::abs(cfg.a))) {
        throw Error(ErrorCode::parameter, "scheme.lambda and scheme.a must be finite");
    }
    if (cfg.f0 && !cfg.f0->compatible(cfg.g)) {
        throw Error(ErrorCode::invalid_field, "initial iterate f0 does not match g");
    }
}

Real effective_R(const SpectralData& spec, const SchemeConfig& cfg) {
    if (!cfg.R_auto) return cfg.R;
    if (!spec.invertible()) throw Error(ErrorCode::near_singular, "R = auto needs an invertible D_P");
    return 2.0 / std::abs(spec.lambda1());
}

Real IterationReport::max_ratio() const {
    if (ratios.empty()) return 0.0;
    return *std::max_element(ratios.begin(), ratios.end());
}

const SpinorField& IterationReport::solution() const {
    if (states.empty()) throw Error(ErrorCode::numerical, "iteration report has no iterates");
    return states.back().u;
}

SpinorField step(const SpectralData& spec, const SchemeConfig& cfg, const SpinorField& u_k) {
    const StepContext ctx = prepare(spec, cfg);
    return embed_with_datum(ctx, step_coords(ctx, u_k));
}

IterationReport run(const SpectralData& spec, const SchemeConfig& cfg) {
    const StepContext ctx = prepare(spec, cfg);
    const AssembledOperator& op = spec.op();
    const Real blowup = 10.0 * std::max({cfg.xi, cfg.lambda_cap, 1.0});
    // With lambda = 0 and a = 0 the step map does not depend on u_k.
    const bool constant_map = cfg.lambda == Complex(0.0) && cfg.a == Complex(0.0);

    IterationReport report;
    SpinorField u = cfg.f0 ? *cfg.f0 : cfg.g;
    VectorXc tilde_prev = op.project(u - cfg.g);
    Real delta_prev = std::numeric_limits<Real>::quiet_NaN();
    bool finished = false;

    for (int k = 1; k <= cfg.max_iter && !finished; ++k) {
        VectorXc tilde;
        try {
            tilde = step_coords(ctx, u);
            u = embed_with_datum(ctx, tilde);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::divergence) throw;
            report.verdict = Verdict::diverged;
            finished = true;
            break;
        }
        IterationState state{k, u, u - cfg.g, 0.0, 0.0, 0.0, 0.0};
        state.delta_norm_H12D = half_graph_norm(spec, tilde - tilde_prev);
        state.l2t_norm = l2_norm(u);
        state.h1t_norm = w1q_norm(u, 2.0);
        state.pde_residual = op.project(residual_field(spec, cfg, u)).norm();
        if (k >= 2) {
            const Real d = state.delta_norm_H12D;
            report.ratios.push_back(delta_prev > 0.0 ? d / delta_prev
                                                     : (d == 0.0 ? 0.0 : std::numeric_limits<Real>::infinity()));
        }
        delta_prev = state.delta_norm_H12D;
        tilde_prev = tilde;
        if (state.l2t_norm > cfg.xi || state.h1t_norm > cfg.lambda_cap) report.bounds_held = false;
        const bool small_residual = state.pde_residual < cfg.tol_residual;
        const bool small_step = state.delta_norm_H12D < cfg.tol_cauchy &&
                                (report.ratios.empty() || report.ratios.back() < 1.0);
        const bool blew_up = state.l2t_norm > blowup;
        report.states.push_back(std::move(state));

        if (blew_up) {
            report.verdict = Verdict::diverged;
            finished = true;
        } else if (small_residual && (small_step || constant_map)) {
            report.verdict = Verdict::converged;
            finished = true;
        }
    }
    if (!finished) report.verdict = report.bounds_held ? Verdict::max_iter_exceeded : Verdict::bound_violated;

    if (!report.states.empty()) {
        const SolutionCheck check = verify_solution(spec, cfg, report.states.back().u);
        report.pde_residual = check.pde_residual;
        report.pde_residual_pointwise = check.pde_residual_pointwise;
        report.boundary_residual = check.boundary_residual;
    }
    return report;
}

SchemeConfig scale_problem(const SchemeConfig& cfg, Real alpha) {
    if (cfg.p == 2.0) throw Error(ErrorCode::undefined_scaling, "rescaling needs p > 2");
    if (!(cfg.p > 2.0)) throw Error(ErrorCode::parameter, "scheme.p must be > 2 for rescaling");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::parameter, "scale factor alpha must be positive");
    const Real beta = std::pow(alpha, 1.0 / (2.0 - cfg.p));
    SchemeConfig out = cfg;
    out.lambda = alpha * cfg.lambda;
    out.g = beta * cfg.g;
    if (cfg.f0) out.f0 = beta * *cfg.f0;
    out.xi = beta * cfg.xi;
    out.lambda_cap = beta * cfg.lambda_cap;
    return out;
}

SolutionCheck verify_solution(const SpectralData& spec, const SchemeConfig& cfg, const SpinorField& u) {
    const AssembledOperator& op = spec.op();
    const SpinorField res = residual_field(spec, cfg, u);
    SolutionCheck out;
    out.pde_residual = op.project(res).norm();
    out.pde_residual_pointwise = l2_norm(res);
    out.boundary_residual = boundary_residual(op.spec(), u, cfg.g);
    return out;
}

}  // namespace nldirac

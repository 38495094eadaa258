#include "nldirac/variational.hpp"

#include <cmath>
#include <limits>

namespace nldirac {

SpinorField constrained_D(const SpectralData& spec, const SpinorField& phi) {
    const AssembledOperator& op = spec.op();
    return op.embed(spec.apply_D(op.project(phi)));
}

Real variational_functional(const SpectralData& spec, const SpinorField& phi, int n) {
    if (n < 2) throw Error(ErrorCode::parameter, "dimension parameter n must be >= 2");
    const Real q = 2.0 * n / (n + 1.0);
    const SpinorField dphi = constrained_D(spec, phi);
    const Real pairing = std::abs(inner_product(dphi, phi).real());
    const Real scale = l2_norm(dphi) * l2_norm(phi);
    if (!(pairing > 1e-12 * scale) || scale == 0.0) {
        throw Error(ErrorCode::degenerate_pairing, "Re <D phi, phi> vanishes");
    }
    const Real lq = lp_norm(dphi, q);
    // (||D phi||_q^q)^{(n+1)/n} = ||D phi||_q^2 since q (n+1)/n = 2.
    return lq * lq / pairing;
}

SpinorField el_transform(const SpectralData& spec, const SpinorField& phi, Real q) {
    if (!(q > 1.0)) throw Error(ErrorCode::parameter, "exponent q must be > 1");
    SpinorField dphi = constrained_D(spec, phi);
    // For q < 2 the power amplifies round-off; values at round-off level of
    // |lambda_max| |phi| count as exact zeros.
    const Real lam_max = spec.dimension() > 0 ? spec.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
    const Real floor = 64.0 * std::numeric_limits<Real>::epsilon() * lam_max * phi.values().cwiseAbs().maxCoeff();
    SpinorField::Values v = dphi.values();
    for (Index i = 0; i < v.rows(); ++i) {
        if (v.row(i).norm() <= floor) v.row(i).setZero();
    }
    return modulus_power(SpinorField(dphi.grid(), std::move(v)), q - 2.0);
}

Real el_q_residual(const SpectralData& spec, const SpinorField& phi, Real q, Complex mu) {
    const SpinorField dphi = constrained_D(spec, phi);
    const SpinorField psi = el_transform(spec, phi, q);
    const SpinorField dpsi = apply_D(spec.op().spec(), psi);
    return l2_norm(SpinorField(dpsi.grid(), dpsi.values() - mu * dphi.values()));
}

}  // namespace nldirac

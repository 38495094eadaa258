#include "nldirac/variational.hpp"

#include "nldirac/scheme.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nldirac;
using namespace nldirac::testing;

namespace {

const SpectralData& antiperiodic128() {
    static const SpectralData spec = decompose(assemble(antiperiodic_model(128)));
    return spec;
}

}  // namespace

TEST(Functional, EigenfunctionsGiveEigenvalueModulus) {
    const SpectralData& spec = antiperiodic128();
    for (int n : {2, 3, 5}) {
        for (Index k = 0; k < 10; ++k) {
            const Real f = variational_functional(spec, spec.eigenfunction(k), n);
            EXPECT_NEAR(f, std::abs(spec.eigenvalues()(k)), 1e-8 * std::abs(spec.eigenvalues()(k))) << n << ' ' << k;
        }
    }
}

TEST(Functional, BagEigenspinorsHaveConstantModulus) {
    const SpectralData spec = decompose(assemble(bag_model(64)));
    for (Index k = 0; k < 6; ++k) {
        const Real f = variational_functional(spec, spec.eigenfunction(k), 2);
        EXPECT_NEAR(f, std::abs(spec.eigenvalues()(k)), 1e-8 * std::abs(spec.eigenvalues()(k)));
    }
}

TEST(Functional, MinimumOverLowModesIsLambda1) {
    const SpectralData& spec = antiperiodic128();
    Real best = std::numeric_limits<Real>::infinity();
    for (Index k = 0; k < 10; ++k) best = std::min(best, variational_functional(spec, spec.eigenfunction(k), 2));
    EXPECT_NEAR(best, std::abs(spec.lambda1()), 1e-8);
}

TEST(Functional, ZeroHomogeneous) {
    const SpectralData& spec = antiperiodic128();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<Real> scale(0.1, 10.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        // Positive spectral part keeps the pairing away from zero.
        const VectorXc c = spec.split_pm(random_band_limited(spec, 12, seed)).first;
        const SpinorField phi = spec.op().embed(c);
        const Real f = variational_functional(spec, phi, 2);
        const Real s = scale(rng);
        EXPECT_LE(std::abs(variational_functional(spec, s * phi, 2) - f), 1e-10 * f);
    }
}

TEST(Functional, DegeneratePairing) {
    const SpectralData& spec = antiperiodic128();
    // lambda_1 = pi and lambda_2 = -pi cancel in Re <D phi, phi>.
    const SpinorField phi = spec.eigenfunction(0) + spec.eigenfunction(1);
    try {
        variational_functional(spec, phi, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate_pairing);
    }
    EXPECT_THROW(variational_functional(spec, SpinorField::zeros(spec.op().grid(), 1), 2), Error);
    EXPECT_THROW(variational_functional(spec, spec.eigenfunction(0), 1), Error);
}

TEST(ElTransform, UnitModulusEigenfunction) {
    const SpectralData& spec = antiperiodic128();
    const SpinorField phi = plane_wave(spec.op().grid(), pi);
    const Real q = 4.0 / 3.0;
    EXPECT_LT(l2_norm(el_transform(spec, phi, q) - std::pow(pi, q - 1.0) * phi), 1e-9);
}

TEST(ElTransform, KernelMapsToZero) {
    const SpectralData spec = decompose(assemble(periodic_model(64)));
    const SpinorField c = SpinorField(spec.op().grid(), SpinorField::Values::Constant(64, 1, 0.7));
    EXPECT_LT(l2_norm(el_transform(spec, c, 1.5)), 1e-12);
}

TEST(ElTransform, ResidualTransfersFromDiracSolution) {
    // u = beta e^{i pi x} solves D u = lambda |u|^{p-2} u with lambda = pi beta^{2-p}.
    // phi with D phi = |u|^{p-2} u gives Psi = u for conjugate q, and the q-form
    // D(|D phi|^{q-2} D phi) = mu D phi holds with mu = lambda.
    const int n = 2;
    const Real p = 2.0 * n / (n - 1.0);
    const Real q = 2.0 * n / (n + 1.0);
    ASSERT_NEAR(1.0 / p + 1.0 / q, 1.0, 1e-15);
    const SpectralData& spec = antiperiodic128();
    const Real beta = 0.4;
    const Real lambda = pi * std::pow(beta, 2.0 - p);
    SchemeConfig cfg(plane_wave(spec.op().grid(), pi, beta));
    cfg.p = p;
    cfg.lambda = lambda;
    const SpinorField& u = cfg.g;
    const Real pde = verify_solution(spec, cfg, u).pde_residual_pointwise;

    const SpinorField phi = spec.apply_inverse(nonlinearity(u, p));
    EXPECT_LT(l2_norm(el_transform(spec, phi, q) - u), 1e-9);
    const Real el = el_q_residual(spec, phi, q, lambda);
    EXPECT_LE(el, 10.0 * pde + 1e-9);
    // A wrong multiplier is visible.
    EXPECT_GT(el_q_residual(spec, phi, q, 2.0 * lambda), 1e-3);
}

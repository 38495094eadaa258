#include "nldirac/spectral.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace nldirac;
using namespace nldirac::testing;

namespace {

const SpectralData& antiperiodic256() {
    static const SpectralData spec = decompose(assemble(antiperiodic_model(256)));
    return spec;
}

SpectralData diag_example() {
    MatrixXc m = MatrixXc::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 2.0;
    return decompose(m);
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::parse;
}

}  // namespace

TEST(Decompose, AntiperiodicLowestModes) {
    const SpectralData& spec = antiperiodic256();
    EXPECT_NEAR(spec.lambda1() / pi, 1.0, 1e-6);
    EXPECT_NEAR(spec.eigenvalues()(1), -pi, 1e-6 * pi);
    EXPECT_NEAR(std::abs(spec.eigenvalues()(2)), 3.0 * pi, 1e-6 * pi);
    EXPECT_NEAR(std::abs(spec.eigenvalues()(4)), 5.0 * pi, 1e-6 * pi);
    EXPECT_TRUE(spec.invertible());
    EXPECT_LE(spec.max_residual(), 1e-9);
    EXPECT_LE(spec.gram_defect(), 1e-10);
}

TEST(Decompose, SortedByModulusPositiveFirst) {
    const auto& ev = antiperiodic256().eigenvalues();
    for (Index k = 1; k < ev.size(); ++k) {
        EXPECT_LE(std::abs(ev(k - 1)), std::abs(ev(k)) + 1e-9 * std::abs(ev(k)));
    }
    for (Index k = 0; k + 1 < 20; k += 2) {
        EXPECT_GT(ev(k), 0.0);
        EXPECT_LT(ev(k + 1), 0.0);
    }
}

TEST(Decompose, PeriodicHasZeroMode) {
    const SpectralData spec = decompose(assemble(periodic_model(256)));
    EXPECT_FALSE(spec.invertible());
    EXPECT_LT(std::abs(spec.lambda1()), 1e-10);
}

TEST(Decompose, DiagonalExample) {
    const SpectralData spec = diag_example();
    EXPECT_EQ(spec.lambda1(), -1.0);
    EXPECT_EQ(spec.eigenvalues()(1), 2.0);
    EXPECT_FALSE(spec.has_operator());
    EXPECT_EQ(code_of([&] { (void)spec.eigenfunction(0); }), ErrorCode::configuration);
}

TEST(Decompose, TieBreakPrefersPositive) {
    MatrixXc m = MatrixXc::Zero(3, 3);
    m(0, 0) = 3.0;
    m(1, 1) = -1.0;
    m(2, 2) = 1.0;
    const SpectralData spec = decompose(m);
    EXPECT_EQ(spec.lambda1(), 1.0);
    EXPECT_EQ(spec.eigenvalues()(1), -1.0);
}

TEST(Decompose, RejectsEmpty) {
    EXPECT_EQ(code_of([] { decompose(MatrixXc(0, 0)); }), ErrorCode::parameter);
    EXPECT_EQ(code_of([] { decompose(MatrixXc::Zero(2, 3)); }), ErrorCode::parameter);
}

TEST(Decompose, EigenfunctionsSolveModelEquation) {
    const SpectralData spec = decompose(assemble(bag_model(96)));
    const ModelSpec& m = spec.op().spec();
    for (Index k = 0; k < 6; ++k) {
        const SpinorField phi = spec.eigenfunction(k);
        EXPECT_NEAR(l2_norm(phi), 1.0, 1e-12);
        EXPECT_LT(l2_norm(apply_D(m, phi) - spec.eigenvalues()(k) * phi), 1e-9);
    }
}

TEST(ApplyInverse, EigenfunctionIdentity) {
    const SpectralData& spec = antiperiodic256();
    const SpinorField f = plane_wave(spec.op().grid(), pi);
    EXPECT_LT(l2_norm(spec.apply_inverse(f) - (1.0 / pi) * f), 1e-9);
}

TEST(ApplyInverse, ComposesWithD) {
    const SpectralData& spec = antiperiodic256();
    const VectorXc f = random_coords(spec.dimension(), 1);
    EXPECT_LT((spec.apply_inverse(spec.apply_D(f)) - f).norm(), 1e-9 * f.norm());
    const Complex a(2.0, 0.5);
    const VectorXc g = spec.apply_inverse(f, a);
    EXPECT_LT((spec.apply_D(g) - a * g - f).norm(), 1e-9 * f.norm());
}

TEST(ApplyInverse, DiagonalExample) {
    const SpectralData spec = diag_example();
    const VectorXc out = spec.apply_inverse(VectorXc::Ones(2));
    EXPECT_NEAR(std::abs(out(0) - Complex(-1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out(1) - Complex(0.5)), 0.0, 1e-15);
}

TEST(ApplyInverse, NearSingularShift) {
    const SpectralData spec = diag_example();
    EXPECT_EQ(code_of([&] { spec.apply_inverse(VectorXc::Ones(2), 2.0 + 1e-9); }), ErrorCode::near_singular);
    EXPECT_NO_THROW(spec.apply_inverse(VectorXc::Ones(2), 2.0 + 1e-6));
    const SpectralData periodic = decompose(assemble(periodic_model(32)));
    EXPECT_EQ(code_of([&] { periodic.apply_inverse(VectorXc::Ones(periodic.dimension())); }),
              ErrorCode::near_singular);
    EXPECT_EQ(code_of([&] { spec.apply_inverse(VectorXc::Ones(3)); }), ErrorCode::invalid_field);
}

TEST(ApplyInverse, OperatorNormBound) {
    const SpectralData& spec = antiperiodic256();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const VectorXc f = random_coords(spec.dimension(), seed);
        EXPECT_LE(spec.apply_inverse(f).norm(), f.norm() / std::abs(spec.lambda1()) + 1e-10);
    }
}

TEST(Fractional, SingleMode) {
    const SpectralData& spec = antiperiodic256();
    const SpinorField f = plane_wave(spec.op().grid(), pi);
    EXPECT_LT(l2_norm(spec.apply_fractional(0.5, f) - std::sqrt(pi) * f), 1e-9);
}

TEST(Fractional, HalfTwiceIsAbsolute) {
    const SpectralData& spec = antiperiodic256();
    const VectorXc f = random_coords(spec.dimension(), 5);
    const VectorXc once = spec.apply_fractional(1.0, f);
    EXPECT_LT((spec.apply_fractional(0.5, spec.apply_fractional(0.5, f)) - once).norm(), 1e-10 * once.norm());
    auto [plus, minus] = spec.split_pm(f);
    EXPECT_LT((spec.apply_D(plus) - spec.apply_D(minus) - once).norm(), 1e-10 * once.norm());
}

TEST(Fractional, Errors) {
    const SpectralData periodic = decompose(assemble(periodic_model(32)));
    const VectorXc f = VectorXc::Ones(periodic.dimension());
    EXPECT_EQ(code_of([&] { periodic.apply_fractional(0.5, f); }), ErrorCode::singular_power);
    EXPECT_NO_THROW(periodic.apply_fractional(1.0, f));
    EXPECT_EQ(code_of([&] { periodic.apply_fractional(0.0, f); }), ErrorCode::parameter);
    EXPECT_EQ(code_of([&] { periodic.apply_fractional(1.5, f); }), ErrorCode::parameter);
}

TEST(SplitPm, DiagonalExample) {
    const SpectralData spec = diag_example();
    auto [plus, minus] = spec.split_pm(VectorXc::Ones(2));
    EXPECT_LT((plus - VectorXc::Unit(2, 1)).norm(), 1e-15);
    EXPECT_LT((minus - VectorXc::Unit(2, 0)).norm(), 1e-15);
}

TEST(SplitPm, PositiveEigenfunction) {
    const SpectralData& spec = antiperiodic256();
    const SpinorField f = spec.eigenfunction(0);
    auto [plus, minus] = spec.split_pm(f);
    EXPECT_LT(l2_norm(plus - f), 1e-12);
    EXPECT_LT(l2_norm(minus), 1e-12);
}

TEST(SplitPm, Pythagoras) {
    const SpectralData& spec = antiperiodic256();
    const VectorXc f = random_coords(spec.dimension(), 9);
    auto [plus, minus] = spec.split_pm(f);
    EXPECT_NEAR(plus.squaredNorm() + minus.squaredNorm(), f.squaredNorm(), 1e-10 * f.squaredNorm());
    EXPECT_LT((plus + minus - f).norm(), 1e-12 * f.norm());
}

TEST(SplitPm, ZeroModeIsError) {
    const SpectralData periodic = decompose(assemble(periodic_model(32)));
    EXPECT_EQ(code_of([&] { periodic.split_pm(VectorXc::Ones(periodic.dimension())); }),
              ErrorCode::undefined_splitting);
}

TEST(SplitPm, CommutesWithFractional) {
    const SpectralData& spec = antiperiodic256();
    const VectorXc f = random_coords(spec.dimension(), 10);
    const VectorXc lhs = spec.split_pm(spec.apply_fractional(0.5, f)).first;
    const VectorXc rhs = spec.apply_fractional(0.5, spec.split_pm(f).first);
    EXPECT_LT((lhs - rhs).norm(), 1e-10 * std::max(1.0, lhs.norm()));
}

TEST(GraphNorm, Values) {
    const SpectralData& spec = antiperiodic256();
    const SpinorField phi = spec.eigenfunction(2);
    EXPECT_NEAR(spec.graph_norm(0.5, phi), std::sqrt(1.0 + std::abs(spec.eigenvalues()(2))), 1e-10);
    EXPECT_EQ(spec.graph_norm(0.5, VectorXc::Zero(spec.dimension())), 0.0);
    const VectorXc f = random_coords(spec.dimension(), 11);
    for (Real s : {0.25, 0.5, 1.0}) {
        const Real lhs = std::pow(spec.graph_norm(s, f), 2);
        const Real rhs = f.squaredNorm() + spec.apply_fractional(s, f).squaredNorm();
        EXPECT_NEAR(lhs, rhs, 1e-10 * rhs);
    }
}

TEST(Reconstruction, EigenExpansion) {
    const SpectralData spec = decompose(assemble(bag_model(64)));
    const VectorXc f = random_coords(spec.dimension(), 12);
    const VectorXc back = spec.eigenvectors() * (spec.eigenvectors().adjoint() * f);
    EXPECT_LT((back - f).norm(), 1e-10 * f.norm());
}

TEST(RegularityConstants, DominateEigenfunctionQuotients) {
    const SpectralData spec = decompose(assemble(antiperiodic_model(96)));
    const RegularityConstants c = estimate_constants(spec);
    EXPECT_GE(c.c1_emp, 1.0 - 1e-6);
    for (Index k = 0; k < spec.dimension(); k += 7) {
        const SpinorField phi = spec.eigenfunction(k);
        const Real lam = spec.eigenvalues()(k);
        const Real w12 = std::pow(l2_norm(phi), 2) + std::pow(l2_norm(grid_derivative(phi)), 2);
        EXPECT_LE(w12 / (1.0 + lam * lam), c.c1_emp * (1.0 + 1e-9));
        const Real sl = std::pow(slobodeckij_norm(phi, 0.5), 2);
        EXPECT_LE(sl / (1.0 + std::abs(lam)), c.c_half_emp * (1.0 + 1e-9));
    }
    EXPECT_NEAR(c.c_half_formula, 2.0 * c.c1_emp, 1e-12);
}

TEST(RegularityConstants, FormulaPlugIn) {
    const SpectralData spec = decompose(assemble(antiperiodic_model(32)));
    const RegularityConstants c = estimate_constants(spec, 1.5, 2.0);
    EXPECT_NEAR(c.c_half_formula, 2.0 * c.c1_emp * 2.25 * 4.0, 1e-12);
}

TEST(RegularityConstants, NeedsInvertible) {
    const SpectralData periodic = decompose(assemble(periodic_model(32)));
    EXPECT_EQ(code_of([&] { estimate_constants(periodic); }), ErrorCode::degenerate_form);
}

TEST(Properties, FractionalRegularityStableUnderRefinement) {
    auto max_ratio = [](Index n) {
        const SpectralData spec = decompose(assemble(antiperiodic_model(n)));
        Real best = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const VectorXc c = random_coords(spec.dimension(), 1000 + seed);
            const SpinorField psi = spec.op().embed(c);
            best = std::max(best, std::pow(slobodeckij_norm(psi, 0.5) / spec.graph_norm(0.5, c), 2));
        }
        return best;
    };
    const Real coarse = max_ratio(128);
    const Real fine = max_ratio(256);
    EXPECT_TRUE(std::isfinite(coarse));
    EXPECT_LE(std::max(coarse, fine) / std::min(coarse, fine), 2.0) << coarse << " vs " << fine;
}

#include "nldirac/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace nldirac {
namespace {

constexpr Real residual_tolerance = 1e-9;
constexpr Real zero_mode_tolerance = 1e-10;
constexpr Real shift_tolerance = 1e-8;
constexpr Real tie_tolerance = 1e-10;

void require_dimension(const SpectralData& spec, const VectorXc& coords) {
    if (coords.size() != spec.dimension()) {
        throw Error(ErrorCode::invalid_field, "coordinate vector has length " + std::to_string(coords.size()) +
                                                  ", expected " + std::to_string(spec.dimension()));
    }
}

MatrixXc dense_embedding(const AssembledOperator& op) { return MatrixXc(op.constraint_map()); }

// Stacked quadrature weights, one entry per (point, component).
Eigen::VectorXd stacked_weights(const AssembledOperator& op) {
    const auto w = op.grid().weights();
    Eigen::VectorXd out(w.size() * op.rank());
    for (Index i = 0; i < w.size(); ++i) out.segment(i * op.rank(), op.rank()).setConstant(w(i));
    return out;
}

// Kronecker product of a scalar-field matrix with the identity on the fiber.
template <typename Derived>
MatrixXc fiberwise(const Eigen::MatrixBase<Derived>& a, Index r) {
    MatrixXc out = MatrixXc::Zero(a.rows() * r, a.cols() * r);
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            for (Index c = 0; c < r; ++c) out(i * r + c, j * r + c) = a(i, j);
        }
    }
    return out;
}

// Largest eigenvalue of (E^* Q E) relative to the diagonal form V diag(den) V^*.
Real max_generalized_quotient(const SpectralData& spec, const MatrixXc& numerator_coords,
                              const Eigen::VectorXd& denominator) {
    if ((denominator.array() <= 0.0).any() || !denominator.allFinite()) {
        throw Error(ErrorCode::degenerate_form, "denominator quadratic form is not positive definite");
    }
    const MatrixXc t = spec.eigenvectors() * denominator.cwiseInverse().cwiseSqrt().asDiagonal();
    const MatrixXc reduced = t.adjoint() * numerator_coords * t;
    Eigen::SelfAdjointEigenSolver<MatrixXc> solver(reduced, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::numerical, "generalized eigenproblem failed");
    return solver.eigenvalues().maxCoeff();
}

}  // namespace

SpectralData decompose(const MatrixXc& hermitian) {
    if (hermitian.rows() != hermitian.cols() || hermitian.rows() == 0) {
        throw Error(ErrorCode::parameter, "decompose needs a non-empty square matrix");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXc> solver(hermitian);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "Hermitian eigensolver did not converge (dimension " << hermitian.rows() << ", info "
            << static_cast<int>(solver.info()) << ")";
        throw Error(ErrorCode::numerical, msg.str());
    }
    const Eigen::VectorXd& raw = solver.eigenvalues();
    std::vector<Index> order(raw.size());
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Real ma = std::abs(raw(a));
        const Real mb = std::abs(raw(b));
        if (ma != mb) return ma < mb;
        return raw(a) > raw(b);
    });
    // Moduli equal up to roundoff are ties as well; put the positive one first.
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const Real a = raw(order[k]);
        const Real b = raw(order[k + 1]);
        const Real tol = tie_tolerance * std::max(Real(1), std::abs(a));
        if (a < 0 && b > 0 && std::abs(std::abs(a) - std::abs(b)) <= tol) std::swap(order[k], order[k + 1]);
    }

    SpectralData out;
    out.eigenvalues_.resize(raw.size());
    out.eigenvectors_.resize(raw.size(), raw.size());
    for (Index k = 0; k < raw.size(); ++k) {
        out.eigenvalues_(k) = raw(order[k]);
        out.eigenvectors_.col(k) = solver.eigenvectors().col(order[k]);
    }

    const MatrixXc full = hermitian.selfadjointView<Eigen::Lower>();
    const MatrixXc residual = full * out.eigenvectors_ - out.eigenvectors_ * out.eigenvalues_.asDiagonal();
    for (Index k = 0; k < residual.cols(); ++k) {
        out.max_residual_ = std::max(out.max_residual_, residual.col(k).norm() / std::max(Real(1), std::abs(out.eigenvalues_(k))));
    }
    out.gram_defect_ = (out.eigenvectors_.adjoint() * out.eigenvectors_ - MatrixXc::Identity(raw.size(), raw.size()))
                           .cwiseAbs()
                           .maxCoeff();
    if (out.max_residual_ > residual_tolerance || out.gram_defect_ > 1e-10) {
        std::ostringstream msg;
        msg << "eigendecomposition failed verification: residual " << out.max_residual_ << ", gram defect "
            << out.gram_defect_;
        throw Error(ErrorCode::numerical, msg.str());
    }
    const Real scale = std::max(Real(1), out.eigenvalues_.cwiseAbs().maxCoeff());
    out.invertible_ = std::abs(out.eigenvalues_(0)) > zero_mode_tolerance * scale;
    return out;
}

SpectralData decompose(const AssembledOperator& op) {
    SpectralData out = decompose(op.matrix());
    out.operator_ = std::make_shared<const AssembledOperator>(op);
    return out;
}

const AssembledOperator& SpectralData::op() const {
    if (!operator_) throw Error(ErrorCode::configuration, "spectral data has no attached model operator");
    return *operator_;
}

SpinorField SpectralData::eigenfunction(Index k) const { return op().embed(eigenvectors_.col(k)); }

void SpectralData::require_power(Real s) const {
    if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::parameter, "fractional power s must lie in (0,1]");
    if (s < 1.0 && !invertible_) {
        throw Error(ErrorCode::singular_power, "|D_P|^s with s < 1 needs an invertible operator (lambda1 = " +
                                                   std::to_string(lambda1()) + ")");
    }
}

VectorXc SpectralData::apply_D(const VectorXc& coords) const {
    require_dimension(*this, coords);
    return eigenvectors_ * (eigenvalues_.cast<Complex>().asDiagonal() * (eigenvectors_.adjoint() * coords));
}

VectorXc SpectralData::apply_inverse(const VectorXc& coords, Complex shift) const {
    require_dimension(*this, coords);
    if (shift == Complex(0.0) && !invertible_) {
        throw Error(ErrorCode::near_singular, "D_P has the zero mode lambda = " + std::to_string(lambda1()));
    }
    VectorXc factors(dimension());
    for (Index k = 0; k < dimension(); ++k) {
        const Complex gap = eigenvalues_(k) - shift;
        if (std::abs(gap) <= shift_tolerance) {
            std::ostringstream msg;
            msg << "shift " << shift << " lies within " << shift_tolerance << " of eigenvalue lambda_" << k << " = "
                << eigenvalues_(k);
            throw Error(ErrorCode::near_singular, msg.str());
        }
        factors(k) = 1.0 / gap;
    }
    return eigenvectors_ * (factors.asDiagonal() * (eigenvectors_.adjoint() * coords));
}

VectorXc SpectralData::apply_fractional(Real s, const VectorXc& coords) const {
    require_dimension(*this, coords);
    require_power(s);
    const Eigen::VectorXd factors = eigenvalues_.cwiseAbs().array().pow(s);
    return eigenvectors_ * (factors.cast<Complex>().asDiagonal() * (eigenvectors_.adjoint() * coords));
}

std::pair<VectorXc, VectorXc> SpectralData::split_pm(const VectorXc& coords) const {
    require_dimension(*this, coords);
    if (!invertible_) throw Error(ErrorCode::undefined_splitting, "zero eigenvalue present, splitting undefined");
    VectorXc coeff = eigenvectors_.adjoint() * coords;
    VectorXc neg = coeff;
    for (Index k = 0; k < dimension(); ++k) (eigenvalues_(k) > 0 ? neg(k) : coeff(k)) = 0.0;
    return {eigenvectors_ * coeff, eigenvectors_ * neg};
}

Real SpectralData::graph_norm(Real s, const VectorXc& coords) const {
    require_dimension(*this, coords);
    require_power(s);
    const Eigen::VectorXd coeff2 = (eigenvectors_.adjoint() * coords).cwiseAbs2();
    const Eigen::VectorXd weight = 1.0 + eigenvalues_.cwiseAbs().array().pow(2.0 * s);
    return std::sqrt(coeff2.dot(weight));
}

SpinorField SpectralData::apply_inverse(const SpinorField& f, Complex shift) const {
    return op().embed(apply_inverse(op().project(f), shift));
}

SpinorField SpectralData::apply_fractional(Real s, const SpinorField& f) const {
    return op().embed(apply_fractional(s, op().project(f)));
}

std::pair<SpinorField, SpinorField> SpectralData::split_pm(const SpinorField& f) const {
    auto [plus, minus] = split_pm(op().project(f));
    return {op().embed(plus), op().embed(minus)};
}

Real SpectralData::graph_norm(Real s, const SpinorField& f) const { return graph_norm(s, op().project(f)); }

RegularityConstants estimate_constants(const SpectralData& spec, Real c_h, Real iota) {
    if (!spec.invertible()) {
        throw Error(ErrorCode::degenerate_form, "regularity constants need an invertible D_P");
    }
    const AssembledOperator& op = spec.op();
    const Index r = op.rank();
    const MatrixXc e = dense_embedding(op);
    const Eigen::VectorXd w = stacked_weights(op);
    const MatrixXc we = w.cast<Complex>().asDiagonal() * e;
    const MatrixXc mass = e.adjoint() * we;

    const MatrixXc d = fiberwise(derivative_matrix(op.grid()), r);
    const MatrixXc de = d * e;
    const MatrixXc w1 = mass + de.adjoint() * (w.cast<Complex>().asDiagonal() * de);
    const Eigen::VectorXd den1 = 1.0 + spec.eigenvalues().array().square();

    const MatrixXc q = fiberwise(slobodeckij_form(op.grid(), 0.5), r);
    const MatrixXc hs = mass + e.adjoint() * q * e;
    const Eigen::VectorXd den_half = 1.0 + spec.eigenvalues().cwiseAbs().array();

    RegularityConstants out;
    out.c1_emp = max_generalized_quotient(spec, w1, den1);
    out.c_half_emp = max_generalized_quotient(spec, hs, den_half);
    out.c_half_formula = 2.0 * out.c1_emp * c_h * c_h * iota * iota;
    return out;
}

}  // namespace nldirac

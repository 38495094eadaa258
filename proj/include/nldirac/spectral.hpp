#pragma once

// Eigendecomposition of D_P and the functional calculus built on it.
//
// Every operation exists in two forms: on constrained coordinates (VectorXc,
// the native representation) and on grid fields, which are projected onto the
// constraint space first and embedded again afterwards.

#include "nldirac/assembly.hpp"
#include "nldirac/fields.hpp"
#include "nldirac/types.hpp"

#include <memory>
#include <utility>

namespace nldirac {

class SpectralData {
public:
    /// Eigenvalues sorted by modulus, positive first on ties.
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

    /// Orthonormal eigenvectors in constrained coordinates, same order.
    const MatrixXc& eigenvectors() const noexcept { return eigenvectors_; }

    Real lambda1() const noexcept { return eigenvalues_(0); }
    bool invertible() const noexcept { return invertible_; }
    Index dimension() const noexcept { return eigenvalues_.size(); }

    /// max_k ||M v_k - lambda_k v_k|| / max(1, |lambda_k|).
    Real max_residual() const noexcept { return max_residual_; }
    /// max |V^* V - I|.
    Real gram_defect() const noexcept { return gram_defect_; }

    bool has_operator() const noexcept { return static_cast<bool>(operator_); }
    const AssembledOperator& op() const;

    /// Eigenvector k as a grid field.
    SpinorField eigenfunction(Index k) const;

    VectorXc apply_D(const VectorXc& coords) const;
    VectorXc apply_inverse(const VectorXc& coords, Complex shift = 0.0) const;
    VectorXc apply_fractional(Real s, const VectorXc& coords) const;
    std::pair<VectorXc, VectorXc> split_pm(const VectorXc& coords) const;
    Real graph_norm(Real s, const VectorXc& coords) const;

    SpinorField apply_inverse(const SpinorField& f, Complex shift = 0.0) const;
    SpinorField apply_fractional(Real s, const SpinorField& f) const;
    std::pair<SpinorField, SpinorField> split_pm(const SpinorField& f) const;
    Real graph_norm(Real s, const SpinorField& f) const;

private:
    friend SpectralData decompose(const MatrixXc& hermitian);
    friend SpectralData decompose(const AssembledOperator& op);

    void require_power(Real s) const;

    Eigen::VectorXd eigenvalues_;
    MatrixXc eigenvectors_;
    bool invertible_ = false;
    Real max_residual_ = 0.0;
    Real gram_defect_ = 0.0;
    std::shared_ptr<const AssembledOperator> operator_;
};

/// Dense decomposition of a Hermitian matrix (only the lower triangle is read).
SpectralData decompose(const MatrixXc& hermitian);
SpectralData decompose(const AssembledOperator& op);

struct RegularityConstants {
    Real c1_emp = 0.0;
    Real c_half_emp = 0.0;
    Real c_half_formula = 0.0;
};

/// Maximal generalized Rayleigh quotients
///   c1:     ||psi||^2_{W^{1,2}}      / (||psi||^2 + ||D_P psi||^2)
///   c_half: ||psi||^2_{Slobodeckij}  / (||psi||^2 + || |D_P|^{1/2} psi||^2)
/// over the constraint space, and c_half_formula = 2 c1 c_h^2 iota^2.
RegularityConstants estimate_constants(const SpectralData& spec, Real c_h = 1.0, Real iota = 1.0);

}  // namespace nldirac

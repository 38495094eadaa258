#pragma once

// Model operators D with boundary operator P and the constrained Hermitian
// operator D_P acting on an orthonormal basis of the discrete kernel of P.
//
// All three models are discretized spectrally:
//   periodic      -i d/dx on a circle, integer Fourier modes.
//   antiperiodic  -i d/dx on an interval with u(L) = -u(0), half-integer modes.
//   bag1d         -i sigma_1 d/dx on an interval with rank-one projector
//                 conditions; diagonalizing sigma_1 and reflecting the second
//                 characteristic component turns it into an antiperiodic
//                 problem on [0, 2L].

#include "nldirac/fields.hpp"
#include "nldirac/types.hpp"

#include <Eigen/Sparse>

#include <iosfwd>

namespace nldirac {

enum class OperatorKind { scalar_derivative, dirac_2spinor };
enum class BoundaryKind { antiperiodic, bag1d, periodic };
enum class Endpoint { left, right };

struct ModelSpec {
    Grid1D grid;
    OperatorKind operator_kind = OperatorKind::scalar_derivative;
    BoundaryKind boundary = BoundaryKind::antiperiodic;

    Index rank() const noexcept { return operator_kind == OperatorKind::dirac_2spinor ? 2 : 1; }
};

/// Throws a configuration error when operator, boundary and topology do not fit together.
void validate(const ModelSpec& spec);

/// Rank-one Hermitian projector P with P psi = 0 the homogeneous bag condition at `end`.
Eigen::Matrix2cd bag_projector(Endpoint end);

class AssembledOperator {
public:
    explicit AssembledOperator(const ModelSpec& spec);

    const ModelSpec& spec() const noexcept { return spec_; }
    const Grid1D& grid() const noexcept { return spec_.grid; }
    Index rank() const noexcept { return spec_.rank(); }

    /// Number of constrained coordinates.
    Index dimension() const noexcept { return matrix_.rows(); }

    /// Hermitian matrix of D_P in constrained coordinates.
    const MatrixXc& matrix() const noexcept { return matrix_; }

    /// E: coordinates -> stacked grid values (row i*r + c), with E^* W E = I.
    const Eigen::SparseMatrix<Complex>& constraint_map() const noexcept { return embedding_; }

    /// Field with coordinates `coords` in the kernel of P.
    SpinorField embed(const VectorXc& coords) const;

    /// Coordinates of the quadrature-orthogonal projection of `f` onto the kernel of P.
    VectorXc project(const SpinorField& f) const;

    /// Smooth field carrying the boundary data of `g`: P lift(g) = P g, D lift(g) = 0.
    SpinorField lift(const SpinorField& g) const;

    /// max |M - M^*| / ||M||.
    Real hermiticity_defect() const;

private:
    ModelSpec spec_;
    MatrixXc matrix_;
    Eigen::SparseMatrix<Complex> embedding_;
    Eigen::VectorXd stacked_weights_;
};

AssembledOperator assemble(const ModelSpec& spec);

/// D without boundary condition. Exact (up to roundoff) for fields of the form
/// lift + element of the spectral kernel space; consistent with D_P on that space.
SpinorField apply_D(const ModelSpec& spec, const SpinorField& f);

/// Size of P(u - g) at the boundary points; always 0 for the periodic model.
Real boundary_residual(const ModelSpec& spec, const SpinorField& u, const SpinorField& g);

/// Row-major little-endian complex128 dump (real, imag interleaved).
void write_matrix_binary(std::ostream& out, const MatrixXc& m);
MatrixXc read_matrix_binary(std::istream& in, Index rows, Index cols);

}  // namespace nldirac

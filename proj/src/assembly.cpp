#include "nldirac/assembly.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

namespace nldirac {
namespace {

constexpr Complex I{0.0, 1.0};

// 1D layout of the constrained coordinates: `dofs` equispaced samples of a
// function with period `period`, antiperiodic when `twisted`.
struct Unfolding {
    Index dofs;
    Real period;
    bool twisted;
};

Unfolding unfolding_of(const ModelSpec& spec) {
    const Index n = spec.grid.size();
    const Real length = spec.grid.length();
    switch (spec.boundary) {
        case BoundaryKind::periodic: return {n, length, false};
        case BoundaryKind::antiperiodic: return {n - 1, length, true};
        case BoundaryKind::bag1d: return {2 * (n - 1), 2 * length, true};
    }
    return {n, length, false};
}

Real frequency(Index k, const Unfolding& u) {
    const Index m = u.dofs;
    if (u.twisted) {
        const Index s = k <= (m - 1) / 2 ? k : k - m;
        return Real(2 * s + 1) * pi / u.period;
    }
    const Index s = k < (m + 1) / 2 ? k : k - m;
    return Real(2 * s) * pi / u.period;
}

VectorXc spectral_derivative(const VectorXc& f, const Unfolding& u) {
    const Index m = f.size();
    Eigen::FFT<Real> fft;
    VectorXc work = f;
    if (u.twisted) {
        for (Index j = 0; j < m; ++j) work(j) *= std::exp(-I * pi * Real(j) / Real(m));
    }
    VectorXc spectrum;
    fft.fwd(spectrum, work);
    for (Index k = 0; k < m; ++k) spectrum(k) *= frequency(k, u);
    VectorXc out;
    fft.inv(out, spectrum);
    if (u.twisted) {
        for (Index j = 0; j < m; ++j) out(j) *= std::exp(I * pi * Real(j) / Real(m));
    }
    return out;
}

// Toeplitz matrix of the spectral derivative; entry (j,l) depends on j-l only
// and the lower triangle is the conjugate of the upper, so M = M^* exactly.
MatrixXc derivative_symbol_matrix(const Unfolding& u) {
    const Index m = u.dofs;
    VectorXc omega(m);
    for (Index k = 0; k < m; ++k) omega(k) = frequency(k, u);
    Eigen::FFT<Real> fft;
    VectorXc c;
    fft.inv(c, omega);
    if (u.twisted) {
        for (Index d = 0; d < m; ++d) c(d) *= std::exp(I * pi * Real(d) / Real(m));
    }
    MatrixXc mat(m, m);
    for (Index j = 0; j < m; ++j) {
        mat(j, j) = c(0).real();
        for (Index l = 0; l < j; ++l) {
            mat(j, l) = c(j - l);
            mat(l, j) = std::conj(c(j - l));
        }
    }
    return mat;
}

Eigen::SparseMatrix<Complex> build_embedding(const ModelSpec& spec, Index dofs) {
    const Index n = spec.grid.size();
    const Index r = spec.rank();
    const Real s = 1.0 / std::sqrt(spec.grid.spacing());
    std::vector<Eigen::Triplet<Complex>> t;
    switch (spec.boundary) {
        case BoundaryKind::periodic:
            for (Index i = 0; i < n; ++i) t.emplace_back(i, i, s);
            break;
        case BoundaryKind::antiperiodic:
            for (Index i = 0; i + 1 < n; ++i) t.emplace_back(i, i, s);
            t.emplace_back(n - 1, 0, -s);
            break;
        case BoundaryKind::bag1d: {
            // a = F on [0,L], b(x) = i F(2L - x), psi = ((a+b), (a-b)) / sqrt(2).
            const Complex h = s / std::sqrt(2.0);
            for (Index j = 0; j < n; ++j) {
                t.emplace_back(j * r, j, h);
                t.emplace_back(j * r + 1, j, h);
            }
            for (Index j = 1; j < n; ++j) {
                const Index m = 2 * n - 2 - j;
                t.emplace_back(j * r, m, I * h);
                t.emplace_back(j * r + 1, m, -I * h);
            }
            t.emplace_back(0, 0, -I * h);
            t.emplace_back(1, 0, I * h);
            break;
        }
    }
    Eigen::SparseMatrix<Complex> e(n * r, dofs);
    e.setFromTriplets(t.begin(), t.end());
    return e;
}

Eigen::Vector2cd row2(const SpinorField& f, Index i) { return f.values().row(i).transpose(); }

void require_on_model(const ModelSpec& spec, const SpinorField& f) {
    if (!(f.grid() == spec.grid) || f.rank() != spec.rank()) {
        throw Error(ErrorCode::invalid_field, "field does not live on the model grid with rank " +
                                                  std::to_string(spec.rank()));
    }
}

}  // namespace

void validate(const ModelSpec& spec) {
    const bool scalar = spec.operator_kind == OperatorKind::scalar_derivative;
    const Topology topo = spec.grid.topology();
    switch (spec.boundary) {
        case BoundaryKind::periodic:
            if (!scalar) throw Error(ErrorCode::configuration, "periodic boundary needs the scalar operator");
            if (topo != Topology::circle) throw Error(ErrorCode::configuration, "periodic boundary needs a circle grid");
            break;
        case BoundaryKind::antiperiodic:
            if (!scalar) throw Error(ErrorCode::configuration, "antiperiodic boundary needs the scalar operator");
            if (topo != Topology::interval) throw Error(ErrorCode::configuration, "antiperiodic boundary needs an interval grid");
            break;
        case BoundaryKind::bag1d:
            if (scalar) throw Error(ErrorCode::configuration, "bag1d boundary needs the 2-spinor operator");
            if (topo != Topology::interval) throw Error(ErrorCode::configuration, "bag1d boundary needs an interval grid");
            break;
    }
}

Eigen::Matrix2cd bag_projector(Endpoint end) {
    Eigen::Matrix2cd p;
    const Complex s = end == Endpoint::left ? I : -I;
    p << 1.0, s, std::conj(s), 1.0;
    return 0.5 * p;
}

AssembledOperator::AssembledOperator(const ModelSpec& spec) : spec_(spec) {
    validate(spec_);
    const Unfolding u = unfolding_of(spec_);
    matrix_ = derivative_symbol_matrix(u);
    embedding_ = build_embedding(spec_, u.dofs);
    const auto w = spec_.grid.weights();
    stacked_weights_.resize(w.size() * rank());
    for (Index i = 0; i < w.size(); ++i) stacked_weights_.segment(i * rank(), rank()).setConstant(w(i));
}

SpinorField AssembledOperator::embed(const VectorXc& coords) const {
    if (coords.size() != dimension()) throw Error(ErrorCode::invalid_field, "coordinate vector has wrong length");
    const VectorXc stacked = embedding_ * coords;
    SpinorField::Values v(grid().size(), rank());
    for (Index i = 0; i < grid().size(); ++i) {
        for (Index c = 0; c < rank(); ++c) v(i, c) = stacked(i * rank() + c);
    }
    return SpinorField(grid(), std::move(v));
}

VectorXc AssembledOperator::project(const SpinorField& f) const {
    require_on_model(spec_, f);
    VectorXc stacked(grid().size() * rank());
    for (Index i = 0; i < grid().size(); ++i) {
        for (Index c = 0; c < rank(); ++c) stacked(i * rank() + c) = stacked_weights_(i * rank() + c) * f(i, c);
    }
    return embedding_.adjoint() * stacked;
}

SpinorField AssembledOperator::lift(const SpinorField& g) const {
    require_on_model(spec_, g);
    const Index last = grid().size() - 1;
    switch (spec_.boundary) {
        case BoundaryKind::periodic: return SpinorField::zeros(grid(), 1);
        case BoundaryKind::antiperiodic: {
            const Complex d = 0.5 * (g(0, 0) + g(last, 0));
            return SpinorField(grid(), SpinorField::Values::Constant(grid().size(), 1, d));
        }
        case BoundaryKind::bag1d: {
            const Eigen::Vector2cd c =
                bag_projector(Endpoint::left) * row2(g, 0) + bag_projector(Endpoint::right) * row2(g, last);
            SpinorField::Values v(grid().size(), 2);
            v.col(0).setConstant(c(0));
            v.col(1).setConstant(c(1));
            return SpinorField(grid(), std::move(v));
        }
    }
    return SpinorField::zeros(grid(), rank());
}

Real AssembledOperator::hermiticity_defect() const {
    const Real scale = matrix_.norm();
    if (scale == 0.0) return 0.0;
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() / scale;
}

AssembledOperator assemble(const ModelSpec& spec) { return AssembledOperator(spec); }

SpinorField apply_D(const ModelSpec& spec, const SpinorField& f) {
    validate(spec);
    require_on_model(spec, f);
    const Unfolding u = unfolding_of(spec);
    // Reuse the embedding without building the dense matrix.
    const Eigen::SparseMatrix<Complex> e = build_embedding(spec, u.dofs);
    const auto w = spec.grid.weights();
    const Index n = spec.grid.size();
    const Index r = spec.rank();

    SpinorField homogeneous = f;
    const Index last = n - 1;
    if (spec.boundary == BoundaryKind::antiperiodic) {
        const Complex d = 0.5 * (f(0, 0) + f(last, 0));
        homogeneous = SpinorField(spec.grid, (f.values().array() - d).matrix());
    } else if (spec.boundary == BoundaryKind::bag1d) {
        const Eigen::Vector2cd c =
            bag_projector(Endpoint::left) * row2(f, 0) + bag_projector(Endpoint::right) * row2(f, last);
        SpinorField::Values v = f.values();
        v.rowwise() -= c.transpose();
        homogeneous = SpinorField(spec.grid, std::move(v));
    }

    VectorXc stacked(n * r);
    for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < r; ++c) stacked(i * r + c) = w(i) * homogeneous(i, c);
    }
    const VectorXc coords = e.adjoint() * stacked;
    const VectorXc out = e * spectral_derivative(coords, u);
    SpinorField::Values v(n, r);
    for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < r; ++c) v(i, c) = out(i * r + c);
    }
    return SpinorField(spec.grid, std::move(v));
}

Real boundary_residual(const ModelSpec& spec, const SpinorField& u, const SpinorField& g) {
    require_on_model(spec, u);
    u.require_compatible(g);
    const Index last = spec.grid.size() - 1;
    switch (spec.boundary) {
        case BoundaryKind::periodic: return 0.0;
        case BoundaryKind::antiperiodic: return std::abs((u(last, 0) - g(last, 0)) + (u(0, 0) - g(0, 0)));
        case BoundaryKind::bag1d: {
            const Eigen::Vector2cd e0 = row2(u, 0) - row2(g, 0);
            const Eigen::Vector2cd e1 = row2(u, last) - row2(g, last);
            return (bag_projector(Endpoint::left) * e0).norm() + (bag_projector(Endpoint::right) * e1).norm();
        }
    }
    return 0.0;
}

namespace {

void put_le(std::ostream& out, double value) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &value, sizeof(double));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(double));
}

double get_le(std::istream& in) {
    unsigned char bytes[sizeof(double)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(double))) {
        throw Error(ErrorCode::parse, "matrix dump is truncated");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    double value;
    std::memcpy(&value, bytes, sizeof(double));
    return value;
}

}  // namespace

void write_matrix_binary(std::ostream& out, const MatrixXc& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            put_le(out, m(i, j).real());
            put_le(out, m(i, j).imag());
        }
    }
}

MatrixXc read_matrix_binary(std::istream& in, Index rows, Index cols) {
    MatrixXc m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const double re = get_le(in);
            m(i, j) = {re, get_le(in)};
        }
    }
    return m;
}

}  // namespace nldirac

#pragma once

// Discrete 1D domains, spinor-valued sample fields and the norm families
// used throughout: L^p, W^{1,q} and the Slobodeckij form of H^s.
//
// Quadrature is trapezoidal on intervals and uniform on circles. Fields
// store an N x r matrix of complex samples (grid point x fiber component);
// the fiberwise modulus |f(x)| is the Euclidean norm of a row.

#include "nldirac/types.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace nldirac {

enum class Topology { interval, circle };

template <typename RealT>
class BasicGrid {
public:
    using Scalar = RealT;
    using RealVector = Eigen::Matrix<RealT, Eigen::Dynamic, 1>;

    static constexpr Index min_points = 8;

    BasicGrid(RealT length, Index n_points, Topology topology)
        : length_(length), n_points_(n_points), topology_(topology) {
        if (!(length > RealT(0)) || !std::isfinite(static_cast<double>(length))) {
            throw Error(ErrorCode::invalid_grid, "domain length must be positive and finite");
        }
        if (n_points < min_points) {
            throw Error(ErrorCode::invalid_grid,
                        "grid needs at least " + std::to_string(min_points) + " points, got " +
                            std::to_string(n_points));
        }
        spacing_ = topology == Topology::circle ? length / RealT(n_points)
                                                : length / RealT(n_points - 1);
    }

    RealT length() const noexcept { return length_; }
    Index size() const noexcept { return n_points_; }
    Topology topology() const noexcept { return topology_; }
    RealT spacing() const noexcept { return spacing_; }
    RealT point(Index i) const noexcept { return RealT(i) * spacing_; }

    RealVector points() const {
        RealVector x(n_points_);
        for (Index i = 0; i < n_points_; ++i) x(i) = point(i);
        return x;
    }

    RealVector weights() const {
        RealVector w = RealVector::Constant(n_points_, spacing_);
        if (topology_ == Topology::interval) {
            w(0) *= RealT(0.5);
            w(n_points_ - 1) *= RealT(0.5);
        }
        return w;
    }

    /// Euclidean distance on intervals, arc distance on circles.
    RealT distance(Index i, Index j) const noexcept {
        RealT d = std::abs(point(i) - point(j));
        if (topology_ == Topology::circle) d = std::min(d, length_ - d);
        return d;
    }

    bool operator==(const BasicGrid& other) const noexcept {
        return length_ == other.length_ && n_points_ == other.n_points_ &&
               topology_ == other.topology_;
    }

private:
    RealT length_;
    Index n_points_;
    Topology topology_;
    RealT spacing_{};
};

template <typename RealT>
class BasicSpinorField {
public:
    using Scalar = std::complex<RealT>;
    using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Grid = BasicGrid<RealT>;

    BasicSpinorField(Grid grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.rows() != grid_.size() || values_.cols() < 1) {
            throw Error(ErrorCode::invalid_field, "field shape does not match grid (" +
                                                      std::to_string(values_.rows()) + "x" +
                                                      std::to_string(values_.cols()) + ")");
        }
        if (!values_.allFinite()) {
            throw Error(ErrorCode::invalid_field, "field contains non-finite values");
        }
    }

    static BasicSpinorField zeros(const Grid& grid, Index rank) {
        return BasicSpinorField(grid, Values::Zero(grid.size(), rank));
    }

    /// Samples `fn(x)` at every grid point; `fn` returns one complex value per component.
    template <typename Fn>
    static BasicSpinorField sample(const Grid& grid, Index rank, Fn&& fn) {
        Values v(grid.size(), rank);
        for (Index i = 0; i < grid.size(); ++i) {
            if constexpr (std::is_convertible_v<std::invoke_result_t<Fn, RealT>, Scalar>) {
                v(i, 0) = fn(grid.point(i));
                for (Index c = 1; c < rank; ++c) v(i, c) = Scalar(0);
            } else {
                v.row(i) = fn(grid.point(i)).transpose();
            }
        }
        return BasicSpinorField(grid, std::move(v));
    }

    const Grid& grid() const noexcept { return grid_; }
    Index rank() const noexcept { return values_.cols(); }
    Index size() const noexcept { return values_.rows(); }
    const Values& values() const noexcept { return values_; }
    Scalar operator()(Index i, Index c) const { return values_(i, c); }

    bool compatible(const BasicSpinorField& other) const noexcept {
        return grid_ == other.grid_ && rank() == other.rank();
    }

    void require_compatible(const BasicSpinorField& other) const {
        if (!compatible(other)) {
            throw Error(ErrorCode::invalid_field, "fields live on different grids or ranks");
        }
    }

    /// Fiberwise Euclidean modulus at every grid point.
    Eigen::Matrix<RealT, Eigen::Dynamic, 1> modulus() const { return values_.rowwise().norm(); }

    BasicSpinorField& operator+=(const BasicSpinorField& rhs) {
        require_compatible(rhs);
        values_ += rhs.values_;
        return *this;
    }
    BasicSpinorField& operator-=(const BasicSpinorField& rhs) {
        require_compatible(rhs);
        values_ -= rhs.values_;
        return *this;
    }
    BasicSpinorField& operator*=(Scalar c) {
        values_ *= c;
        return *this;
    }

    friend BasicSpinorField operator+(BasicSpinorField lhs, const BasicSpinorField& rhs) { return lhs += rhs; }
    friend BasicSpinorField operator-(BasicSpinorField lhs, const BasicSpinorField& rhs) { return lhs -= rhs; }
    friend BasicSpinorField operator*(Scalar c, BasicSpinorField f) { return f *= c; }
    friend BasicSpinorField operator*(BasicSpinorField f, Scalar c) { return f *= c; }

private:
    Grid grid_;
    Values values_;
};

using Grid1D = BasicGrid<Real>;
using SpinorField = BasicSpinorField<Real>;

namespace detail {

template <typename RealT>
void require_open_unit_range(RealT s, const char* what) {
    if (!(s > RealT(0) && s < RealT(1))) {
        throw Error(ErrorCode::parameter, std::string(what) + " must lie in (0,1)");
    }
}

template <typename RealT>
void require_exponent(RealT p, const char* what) {
    if (!(p > RealT(1)) || !std::isfinite(static_cast<double>(p))) {
        throw Error(ErrorCode::parameter, std::string(what) + " must lie in (1,inf)");
    }
}

/// Periodic spectral derivative of one column, Nyquist mode dropped.
template <typename RealT>
Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, 1> periodic_derivative(
    const Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, 1>& column, RealT length) {
    using CVector = Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, 1>;
    const Index n = column.size();
    Eigen::FFT<RealT> fft;
    CVector spectrum;
    fft.fwd(spectrum, column);
    const RealT base = RealT(2) * RealT(pi) / length;
    for (Index k = 0; k < n; ++k) {
        Index signed_k = k <= (n - 1) / 2 ? k : k - n;
        if (n % 2 == 0 && k == n / 2) signed_k = 0;
        spectrum(k) *= std::complex<RealT>(0, base * RealT(signed_k));
    }
    CVector out;
    fft.inv(out, spectrum);
    return out;
}

/// Second-order central differences with second-order one-sided ends.
template <typename RealT>
Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, 1> interval_derivative(
    const Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, 1>& f, RealT h) {
    const Index n = f.size();
    Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, 1> d(n);
    const RealT inv2h = RealT(1) / (RealT(2) * h);
    d(0) = (RealT(-3) * f(0) + RealT(4) * f(1) - f(2)) * inv2h;
    for (Index i = 1; i + 1 < n; ++i) d(i) = (f(i + 1) - f(i - 1)) * inv2h;
    d(n - 1) = (RealT(3) * f(n - 1) - RealT(4) * f(n - 2) + f(n - 3)) * inv2h;
    return d;
}

template <typename RealT>
void require_finite(const BasicSpinorField<RealT>& f) {
    if (!f.values().allFinite()) throw Error(ErrorCode::invalid_field, "field contains non-finite values");
}

}  // namespace detail

/// Quadrature inner product sum_x w_x <f(x), g(x)>, conjugate-linear in `f`.
template <typename RealT>
std::complex<RealT> inner_product(const BasicSpinorField<RealT>& f, const BasicSpinorField<RealT>& g) {
    f.require_compatible(g);
    const auto w = f.grid().weights();
    std::complex<RealT> acc(0);
    for (Index i = 0; i < f.size(); ++i) acc += w(i) * f.values().row(i).conjugate().dot(g.values().row(i).conjugate());
    return acc;
}

template <typename RealT>
RealT lp_norm(const BasicSpinorField<RealT>& f, RealT p) {
    detail::require_exponent(p, "Lebesgue exponent p");
    detail::require_finite(f);
    const auto w = f.grid().weights();
    const auto mod = f.modulus();
    const RealT scale = mod.maxCoeff();
    if (scale == RealT(0)) return RealT(0);
    RealT acc(0);
    for (Index i = 0; i < f.size(); ++i) acc += w(i) * std::pow(mod(i) / scale, p);
    return scale * std::pow(acc, RealT(1) / p);
}

template <typename RealT>
RealT l2_norm(const BasicSpinorField<RealT>& f) {
    return lp_norm(f, RealT(2));
}

/// Componentwise grid derivative: spectral on circles, finite differences on intervals.
template <typename RealT>
BasicSpinorField<RealT> grid_derivative(const BasicSpinorField<RealT>& f) {
    using Values = typename BasicSpinorField<RealT>::Values;
    const auto& grid = f.grid();
    Values d(f.size(), f.rank());
    for (Index c = 0; c < f.rank(); ++c) {
        Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, 1> col = f.values().col(c);
        d.col(c) = grid.topology() == Topology::circle ? detail::periodic_derivative(col, grid.length())
                                                       : detail::interval_derivative(col, grid.spacing());
    }
    return BasicSpinorField<RealT>(grid, std::move(d));
}

/// Matrix of `grid_derivative` acting on one scalar component.
template <typename RealT>
Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, Eigen::Dynamic> derivative_matrix(const BasicGrid<RealT>& grid) {
    using CMatrix = Eigen::Matrix<std::complex<RealT>, Eigen::Dynamic, Eigen::Dynamic>;
    const Index n = grid.size();
    CMatrix d = CMatrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        typename BasicSpinorField<RealT>::Values unit = BasicSpinorField<RealT>::Values::Zero(n, 1);
        unit(j, 0) = 1;
        d.col(j) = grid_derivative(BasicSpinorField<RealT>(grid, unit)).values().col(0);
    }
    return d;
}

template <typename RealT>
RealT w1q_norm(const BasicSpinorField<RealT>& f, RealT q) {
    detail::require_exponent(q, "Sobolev exponent q");
    detail::require_finite(f);
    const RealT a = lp_norm(f, q);
    const RealT b = lp_norm(grid_derivative(f), q);
    const RealT scale = std::max(a, b);
    if (scale == RealT(0)) return RealT(0);
    return scale * std::pow(std::pow(a / scale, q) + std::pow(b / scale, q), RealT(1) / q);
}

/// Real symmetric matrix Q with sum_{x != y} w_x w_y |f(x)-f(y)|^2 / d(x,y)^{1+2s} = sum_c f_c^* Q f_c.
template <typename RealT>
Eigen::Matrix<RealT, Eigen::Dynamic, Eigen::Dynamic> slobodeckij_form(const BasicGrid<RealT>& grid, RealT s) {
    detail::require_open_unit_range(s, "Slobodeckij order s");
    const Index n = grid.size();
    const auto w = grid.weights();
    const RealT exponent = RealT(1) + RealT(2) * s;
    Eigen::Matrix<RealT, Eigen::Dynamic, Eigen::Dynamic> q = Eigen::Matrix<RealT, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const RealT k = w(i) * w(j) / std::pow(grid.distance(i, j), exponent);
            q(i, j) = q(j, i) = RealT(-2) * k;
            q(i, i) += RealT(2) * k;
            q(j, j) += RealT(2) * k;
        }
    }
    return q;
}

template <typename RealT>
RealT slobodeckij_norm(const BasicSpinorField<RealT>& f, RealT s) {
    detail::require_open_unit_range(s, "Slobodeckij order s");
    detail::require_finite(f);
    const auto& grid = f.grid();
    const auto w = grid.weights();
    const RealT exponent = RealT(1) + RealT(2) * s;
    RealT seminorm(0);
    for (Index i = 0; i < f.size(); ++i) {
        for (Index j = i + 1; j < f.size(); ++j) {
            const RealT diff = (f.values().row(i) - f.values().row(j)).squaredNorm();
            seminorm += RealT(2) * w(i) * w(j) * diff / std::pow(grid.distance(i, j), exponent);
        }
    }
    const RealT l2 = l2_norm(f);
    return std::sqrt(l2 * l2 + seminorm);
}

/// Pointwise |f(x)|^e f(x) for any real e; points with f(x) = 0 map to 0.
template <typename RealT>
BasicSpinorField<RealT> modulus_power(const BasicSpinorField<RealT>& f, RealT e) {
    detail::require_finite(f);
    auto v = f.values();
    const auto mod = f.modulus();
    for (Index i = 0; i < f.size(); ++i) {
        if (mod(i) == RealT(0)) {
            v.row(i).setZero();
        } else if (e != RealT(0)) {
            v.row(i) *= std::pow(mod(i), e);
        }
    }
    return BasicSpinorField<RealT>(f.grid(), std::move(v));
}

/// |f|^{p-2} f, the power nonlinearity of degree p-1.
template <typename RealT>
BasicSpinorField<RealT> nonlinearity(const BasicSpinorField<RealT>& f, RealT p) {
    if (!(p >= RealT(2))) throw Error(ErrorCode::parameter, "nonlinearity exponent p must be >= 2");
    return modulus_power(f, p - RealT(2));
}

/// CSV with header `x,re_0,im_0,...`; one row per grid point.
template <typename RealT>
void write_csv(std::ostream& out, const BasicSpinorField<RealT>& f) {
    out << "x";
    for (Index c = 0; c < f.rank(); ++c) out << ",re_" << c << ",im_" << c;
    out << '\n' << std::setprecision(17);
    for (Index i = 0; i < f.size(); ++i) {
        out << f.grid().point(i);
        for (Index c = 0; c < f.rank(); ++c) out << ',' << f(i, c).real() << ',' << f(i, c).imag();
        out << '\n';
    }
}

/// Reads a field written by `write_csv`; the x column must match `grid`.
template <typename RealT>
BasicSpinorField<RealT> read_csv(std::istream& in, const BasicGrid<RealT>& grid) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::parse, "empty field CSV");
    Index columns = 1;
    for (char ch : line) columns += ch == ',';
    if (columns < 3 || (columns - 1) % 2 != 0 || line.rfind("x,re_0,im_0", 0) != 0) {
        throw Error(ErrorCode::parse, "field CSV header must be x,re_0,im_0,...");
    }
    const Index rank = (columns - 1) / 2;
    typename BasicSpinorField<RealT>::Values v(grid.size(), rank);
    Index row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= grid.size()) throw Error(ErrorCode::parse, "field CSV has more rows than grid points");
        std::stringstream ss(line);
        std::string cell;
        std::vector<RealT> cells;
        while (std::getline(ss, cell, ',')) {
            try {
                cells.push_back(static_cast<RealT>(std::stod(cell)));
            } catch (const std::exception&) {
                throw Error(ErrorCode::parse, "field CSV line " + std::to_string(row + 2) + ": bad number '" + cell + "'");
            }
        }
        if (static_cast<Index>(cells.size()) != columns) {
            throw Error(ErrorCode::parse, "field CSV line " + std::to_string(row + 2) + ": wrong column count");
        }
        if (std::abs(cells[0] - grid.point(row)) > RealT(1e-9) * std::max(RealT(1), grid.length())) {
            throw Error(ErrorCode::parse, "field CSV line " + std::to_string(row + 2) + ": x does not match grid");
        }
        for (Index c = 0; c < rank; ++c) v(row, c) = {cells[1 + 2 * c], cells[2 + 2 * c]};
        ++row;
    }
    if (row != grid.size()) throw Error(ErrorCode::parse, "field CSV has fewer rows than grid points");
    return BasicSpinorField<RealT>(grid, std::move(v));
}

}  // namespace nldirac

#pragma once

#include <Eigen/SparseCore>
#include <memory>
#include <utility>
#include <vector>

#include "msopinf/grid.hpp"
#include "msopinf/types.hpp"

namespace msopinf {

/// Circulant finite-difference operator acting along one axis of a flattened
/// periodic grid.
///
/// The operator is stored in stencil form: within each grid line of length m,
///   (A u)_j = sum_s  c_s * u_{(j+s) mod m},
/// and the same stencil is applied to every line. A 1D operator is the
/// single-line case; the 2D operators returned by central_difference_2d are
/// I (x) d (x-axis, contiguous lines) and d (x) I (y-axis, strided lines).
///
/// Skew-symmetry (c_s = -c_{m-s}) is exact by construction for the central
/// difference and is preserved under odd powers.
class DiffOperator {
public:
    /// Central difference (u_{j+1} - u_{j-1}) / (2h) with periodic wrap.
    static DiffOperator central_difference(const PeriodicGrid1D& grid);

    /// {Dx, Dy} on the x-fastest flattening of a 2D grid.
    static std::pair<DiffOperator, DiffOperator> central_difference_2d(const PeriodicGrid2D& grid);

    /// The zero operator of the given dimension (empty stencil).
    static DiffOperator zero(Index n);

    /// Total dimension of the vectors the operator acts on.
    Index dim() const { return total_dim_; }
    /// Circulant line length (equals dim() in 1D).
    Index line_length() const { return line_len_; }

    Vector apply(const Vector& u) const;
    /// Column-wise application.
    Matrix apply_columns(const Matrix& u) const;

    /// p-th power along the same axis (stencil self-convolution), p >= 0.
    DiffOperator pow(int p) const;

    Matrix dense() const;
    Eigen::SparseMatrix<double> sparse() const;

    /// Minimum-norm least-squares solution of  A phi = u.  Components of u in
    /// the null space of the circulant (the constant mode and, for even line
    /// length, the alternating mode of the central difference) are projected
    /// out, and phi has zero mean per line.
    Vector solve_potential(const Vector& u) const;
    Matrix solve_potential_columns(const Matrix& u) const;

private:
    DiffOperator() = default;

    Index total_dim_ = 0;
    Index line_len_ = 0;     // m
    Index n_lines_ = 1;
    Index within_stride_ = 1;
    Index line_stride_ = 0;
    // sorted (offset, coefficient) pairs, offsets in [0, m)
    std::vector<std::pair<Index, double>> stencil_;

    struct PinvCache;
    std::shared_ptr<PinvCache> pinv_;  // lazily built, shared across copies

    const std::vector<double>& pinv_stencil() const;
    Index element(Index line, Index j) const {
        return line * line_stride_ + j * within_stride_;
    }
};

/// Convenience wrappers matching the grid-level construction.
DiffOperator central_diff_1d(const PeriodicGrid1D& grid);
std::pair<DiffOperator, DiffOperator> central_diff_2d(const PeriodicGrid2D& grid);

}  // namespace msopinf

#include "msopinf/diff_operator.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace msopinf {

struct DiffOperator::PinvCache {
    std::once_flag flag;
    std::vector<double> coeff;  // dense circulant stencil of the pseudoinverse
};

DiffOperator DiffOperator::central_difference(const PeriodicGrid1D& grid) {
    if (grid.n < 4) throw ConfigError("central difference requires at least 4 nodes");
    DiffOperator op;
    op.total_dim_ = grid.n;
    op.line_len_ = grid.n;
    op.n_lines_ = 1;
    op.within_stride_ = 1;
    op.line_stride_ = grid.n;
    const double c = 1.0 / (2.0 * grid.spacing());
    op.stencil_ = {{1, c}, {grid.n - 1, -c}};
    op.pinv_ = std::make_shared<PinvCache>();
    return op;
}

std::pair<DiffOperator, DiffOperator> DiffOperator::central_difference_2d(const PeriodicGrid2D& grid) {
    if (grid.x.n != grid.y.n) throw ConfigError("2d grid must have equal node counts per axis");
    const Index n = grid.x.n;
    DiffOperator dx = central_difference(grid.x);
    dx.total_dim_ = n * n;
    dx.n_lines_ = n;        // one line per y index, x contiguous
    dx.within_stride_ = 1;
    dx.line_stride_ = n;

    DiffOperator dy = central_difference(grid.y);
    dy.total_dim_ = n * n;
    dy.n_lines_ = n;        // one line per x index, stride n along y
    dy.within_stride_ = n;
    dy.line_stride_ = 1;
    return {dx, dy};
}

DiffOperator DiffOperator::zero(Index n) {
    if (n < 1) throw std::invalid_argument("DiffOperator::zero: dimension must be positive");
    DiffOperator op;
    op.total_dim_ = n;
    op.line_len_ = n;
    op.n_lines_ = 1;
    op.within_stride_ = 1;
    op.line_stride_ = n;
    op.pinv_ = std::make_shared<PinvCache>();
    return op;
}

Vector DiffOperator::apply(const Vector& u) const {
    if (u.size() != total_dim_) throw std::invalid_argument("DiffOperator::apply: dimension mismatch");
    Vector out(total_dim_);
    for (Index l = 0; l < n_lines_; ++l) {
        for (Index j = 0; j < line_len_; ++j) {
            double acc = 0.0;
            for (const auto& [s, c] : stencil_) {
                Index jj = j + s;
                if (jj >= line_len_) jj -= line_len_;
                acc += c * u[element(l, jj)];
            }
            out[element(l, j)] = acc;
        }
    }
    return out;
}

Matrix DiffOperator::apply_columns(const Matrix& u) const {
    if (u.rows() != total_dim_) throw std::invalid_argument("DiffOperator::apply_columns: dimension mismatch");
    Matrix out(u.rows(), u.cols());
    for (Index c = 0; c < u.cols(); ++c) out.col(c) = apply(u.col(c));
    return out;
}

DiffOperator DiffOperator::pow(int p) const {
    if (p < 0) throw std::invalid_argument("DiffOperator::pow: negative power");
    DiffOperator out = *this;
    // identity stencil
    std::vector<double> acc(line_len_, 0.0);
    acc[0] = 1.0;
    for (int it = 0; it < p; ++it) {
        std::vector<double> next(line_len_, 0.0);
        for (Index t = 0; t < line_len_; ++t) {
            if (acc[t] == 0.0) continue;
            for (const auto& [s, c] : stencil_) {
                Index ts = t + s;
                if (ts >= line_len_) ts -= line_len_;
                next[ts] += acc[t] * c;
            }
        }
        acc.swap(next);
    }
    out.stencil_.clear();
    for (Index s = 0; s < line_len_; ++s)
        if (acc[s] != 0.0) out.stencil_.emplace_back(s, acc[s]);
    out.pinv_ = std::make_shared<PinvCache>();
    return out;
}

Matrix DiffOperator::dense() const {
    Matrix d = Matrix::Zero(total_dim_, total_dim_);
    for (Index l = 0; l < n_lines_; ++l)
        for (Index j = 0; j < line_len_; ++j)
            for (const auto& [s, c] : stencil_) {
                Index jj = j + s;
                if (jj >= line_len_) jj -= line_len_;
                d(element(l, j), element(l, jj)) += c;
            }
    return d;
}

Eigen::SparseMatrix<double> DiffOperator::sparse() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(total_dim_) * stencil_.size());
    for (Index l = 0; l < n_lines_; ++l)
        for (Index j = 0; j < line_len_; ++j)
            for (const auto& [s, c] : stencil_) {
                Index jj = j + s;
                if (jj >= line_len_) jj -= line_len_;
                trip.emplace_back(element(l, j), element(l, jj), c);
            }
    Eigen::SparseMatrix<double> m(total_dim_, total_dim_);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

const std::vector<double>& DiffOperator::pinv_stencil() const {
    std::call_once(pinv_->flag, [this] {
        const Index m = line_len_;
        // Circulant eigenvalues lambda_k = sum_s c_s w^{sk}, w = exp(2*pi*i/m).
        std::vector<std::complex<double>> lambda(m, 0.0);
        for (Index k = 0; k < m; ++k) {
            std::complex<double> acc = 0.0;
            for (const auto& [s, c] : stencil_) {
                const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) *
                                   static_cast<double>(s) / static_cast<double>(m);
                acc += c * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            lambda[k] = acc;
        }
        double lmax = 0.0;
        for (const auto& l : lambda) lmax = std::max(lmax, std::abs(l));
        const double tol = 1e-12 * lmax;
        // Pseudoinverse is circulant with eigenvalues 1/lambda_k (0 on the null modes).
        std::vector<double>& p = pinv_->coeff;
        p.assign(m, 0.0);
        for (Index s = 0; s < m; ++s) {
            std::complex<double> acc = 0.0;
            for (Index k = 0; k < m; ++k) {
                if (std::abs(lambda[k]) <= tol) continue;
                const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                   static_cast<double>(s) / static_cast<double>(m);
                acc += std::complex<double>(std::cos(ang), std::sin(ang)) / lambda[k];
            }
            p[s] = acc.real() / static_cast<double>(m);
        }
    });
    return pinv_->coeff;
}

Vector DiffOperator::solve_potential(const Vector& u) const {
    if (u.size() != total_dim_) throw std::invalid_argument("solve_potential: dimension mismatch");
    const std::vector<double>& p = pinv_stencil();
    Vector out(total_dim_);
    for (Index l = 0; l < n_lines_; ++l) {
        for (Index j = 0; j < line_len_; ++j) {
            double acc = 0.0;
            for (Index s = 0; s < line_len_; ++s) {
                Index jj = j + s;
                if (jj >= line_len_) jj -= line_len_;
                acc += p[s] * u[element(l, jj)];
            }
            out[element(l, j)] = acc;
        }
    }
    return out;
}

Matrix DiffOperator::solve_potential_columns(const Matrix& u) const {
    if (u.rows() != total_dim_) throw std::invalid_argument("solve_potential_columns: dimension mismatch");
    Matrix out(u.rows(), u.cols());
    for (Index c = 0; c < u.cols(); ++c) out.col(c) = solve_potential(u.col(c));
    return out;
}

DiffOperator central_diff_1d(const PeriodicGrid1D& grid) {
    return DiffOperator::central_difference(grid);
}

std::pair<DiffOperator, DiffOperator> central_diff_2d(const PeriodicGrid2D& grid) {
    return DiffOperator::central_difference_2d(grid);
}

}  // namespace msopinf

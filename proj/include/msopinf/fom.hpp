#pragma once

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SparseLU>
#include <optional>

#include "msopinf/diff_operator.hpp"
#include "msopinf/grid.hpp"
#include "msopinf/models.hpp"
#include "msopinf/snapshots.hpp"
#include "msopinf/types.hpp"

namespace msopinf {

struct WaveFomState {
    Vector u, v, w;
    double t = 0.0;
};

/// One-step form of the linearly implicit wave scheme
///   -d_t v + D mu_t w = 0,   d_t u = mu_t v,   -D mu_t u = -mu_t w / c^2,
/// advanced by solving (I - (c dt/2)^2 D^2) u' = (I + (c dt/2)^2 D^2) u + dt v.
/// The step matrix is constant and SPD for skew D; it is factored once.
class WaveStepper {
public:
    WaveStepper(const DiffOperator& d, double dt, double c = 1.0);
    WaveFomState step(const WaveFomState& state) const;

private:
    DiffOperator d_;
    DiffOperator d2_;
    double dt_;
    double c2_;
    Eigen::LLT<Matrix> solver_;
};

/// Linearly implicit Kdv step: one LU factorization per step, since the
/// matrix depends on the current state through the advection term.
class KdvStepper {
public:
    KdvStepper(const DiffOperator& d, double dt, double eta, double gamma);
    Vector step(const Vector& u);

private:
    Matrix d_dense_;
    Matrix base_;  // I/dt + (gamma^2/2) D^3
    Matrix rhs_;   // I/dt - (gamma^2/2) D^3
    double dt_, eta_;
};

/// Linearly implicit Zk step on the flattened 2D grid. The step matrix has
/// a fixed sparsity pattern (a few stencil bands per row); sparse LU is
/// recomputed each step.
class ZkStepper {
public:
    ZkStepper(const DiffOperator& dx, const DiffOperator& dy, double dt);
    Vector step(const Vector& u);

private:
    Eigen::SparseMatrix<double> dx_s_;
    Eigen::SparseMatrix<double> lin_;  // (1/2)(Dx^3 + Dx Dy^2)
    double dt_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver_;
};

/// Number of steps for a final time that must be an integer multiple of dt
/// (tolerance 1e-9 before rounding). t_final = 0 gives 0 steps.
int resolve_step_count(double dt, double t_final);

/// Runs the model's stepper from the initial state and records every time
/// level including t = 0 (wave records u, v, w; Kdv only u).
SnapshotSet simulate_fom(const MsModel& model, const PeriodicGrid1D& grid, const Vector& u0,
                         const std::optional<Vector>& v0, double dt, double t_final);

/// 2D counterpart (Zk), u0 flattened x-fastest.
SnapshotSet simulate_fom(const MsModel& model, const PeriodicGrid2D& grid, const Vector& u0,
                         double dt, double t_final);

}  // namespace msopinf

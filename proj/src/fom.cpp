#include "msopinf/fom.hpp"

#include <cmath>
#include <sstream>

namespace msopinf {

WaveStepper::WaveStepper(const DiffOperator& d, double dt, double c)
    : d_(d), d2_(d.pow(2)), dt_(dt), c2_(c * c) {
    const Index n = d.dim();
    Matrix m = Matrix::Identity(n, n) - (c2_ * dt * dt / 4.0) * d2_.dense();
    solver_.compute(m);
    if (solver_.info() != Eigen::Success)
        throw NumericalError("wave step matrix factorization failed (should be SPD for skew D)");
}

WaveFomState WaveStepper::step(const WaveFomState& state) const {
    // (I - s D^2) u' = (I + s D^2) u + dt v,  s = c^2 dt^2 / 4
    const double s = c2_ * dt_ * dt_ / 4.0;
    Vector rhs = state.u + s * d2_.apply(state.u) + dt_ * state.v;
    WaveFomState next;
    next.u = solver_.solve(rhs);
    Vector sum = next.u + state.u;
    next.v = state.v + (c2_ * dt_ / 2.0) * d2_.apply(sum);
    next.w = c2_ * d_.apply(sum) - state.w;
    next.t = state.t + dt_;
    return next;
}

KdvStepper::KdvStepper(const DiffOperator& d, double dt, double eta, double gamma)
    : d_dense_(d.dense()), dt_(dt), eta_(eta) {
    const Index n = d.dim();
    const Matrix d3 = d.pow(3).dense();
    base_ = Matrix::Identity(n, n) / dt + (gamma * gamma / 2.0) * d3;
    rhs_ = Matrix::Identity(n, n) / dt - (gamma * gamma / 2.0) * d3;
}

Vector KdvStepper::step(const Vector& u) {
    Matrix a = base_;
    a.noalias() += (eta_ / 2.0) * (d_dense_ * u.asDiagonal());
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) {
        std::ostringstream msg;
        msg << "kdv step matrix is singular or ill-conditioned (rcond estimate " << rc << ")";
        throw NumericalError(msg.str());
    }
    return lu.solve(rhs_ * u);
}

ZkStepper::ZkStepper(const DiffOperator& dx, const DiffOperator& dy, double dt)
    : dx_s_(dx.sparse()), dt_(dt) {
    if (dx.dim() != dy.dim()) throw std::invalid_argument("ZkStepper: operator dimension mismatch");
    lin_ = 0.5 * (Eigen::SparseMatrix<double>(dx.pow(3).sparse()) +
                  Eigen::SparseMatrix<double>(dx_s_ * dy.pow(2).sparse()));
    lin_.makeCompressed();
}

Vector ZkStepper::step(const Vector& u) {
    const Index n = dx_s_.rows();
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    Eigen::SparseMatrix<double> a = id * (1.0 / dt_) + lin_;
    a += Eigen::SparseMatrix<double>(0.5 * (dx_s_ * u.asDiagonal()));
    a.makeCompressed();
    solver_.compute(a);
    if (solver_.info() != Eigen::Success)
        throw NumericalError("zk step matrix sparse factorization failed");
    Vector rhs = u / dt_ - lin_ * u;
    Vector out = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) throw NumericalError("zk step solve failed");
    return out;
}

int resolve_step_count(double dt, double t_final) {
    if (!(dt > 0)) throw ConfigError("time step must be positive");
    if (t_final < 0) throw ConfigError("final time must be non-negative");
    const double x = t_final / dt;
    const auto steps = static_cast<long long>(std::llround(x));
    if (std::abs(x - static_cast<double>(steps)) > 1e-9 * std::max(1.0, std::abs(x)))
        throw ConfigError("final time is not an integer multiple of dt");
    return static_cast<int>(steps);
}

SnapshotSet simulate_fom(const MsModel& model, const PeriodicGrid1D& grid, const Vector& u0,
                         const std::optional<Vector>& v0, double dt, double t_final) {
    if (u0.size() != grid.n) throw std::invalid_argument("simulate_fom: initial condition size mismatch");
    const int steps = resolve_step_count(dt, t_final);
    const DiffOperator d = central_diff_1d(grid);

    SnapshotSet out;
    out.model = to_string(model.kind);
    out.a = grid.a;
    out.b = grid.b;
    out.nx = grid.n;
    out.ny = 0;
    out.dt = dt;

    switch (model.kind) {
        case ModelKind::Wave: {
            if (!v0) throw std::invalid_argument("simulate_fom: wave requires the initial time derivative");
            if (v0->size() != grid.n) throw std::invalid_argument("simulate_fom: v0 size mismatch");
            const double c = model.constants.at("c");
            WaveStepper stepper(d, dt, c);
            WaveFomState state{u0, *v0, (c * c) * d.apply(u0), 0.0};
            out.u.resize(grid.n, steps + 1);
            Matrix vrec(grid.n, steps + 1), wrec(grid.n, steps + 1);
            out.u.col(0) = state.u;
            vrec.col(0) = state.v;
            wrec.col(0) = state.w;
            for (int n = 0; n < steps; ++n) {
                state = stepper.step(state);
                out.u.col(n + 1) = state.u;
                vrec.col(n + 1) = state.v;
                wrec.col(n + 1) = state.w;
            }
            out.v = std::move(vrec);
            out.w = std::move(wrec);
            break;
        }
        case ModelKind::Kdv: {
            KdvStepper stepper(d, dt, model.constants.at("eta"), model.constants.at("gamma"));
            out.u.resize(grid.n, steps + 1);
            out.u.col(0) = u0;
            Vector u = u0;
            for (int n = 0; n < steps; ++n) {
                u = stepper.step(u);
                out.u.col(n + 1) = u;
            }
            break;
        }
        case ModelKind::Zk:
            throw ConfigError("simulate_fom: zk requires a 2D grid");
    }
    return out;
}

SnapshotSet simulate_fom(const MsModel& model, const PeriodicGrid2D& grid, const Vector& u0,
                         double dt, double t_final) {
    if (model.kind != ModelKind::Zk) throw ConfigError("simulate_fom: 2D grid is only used by zk");
    if (u0.size() != grid.total_dim()) throw std::invalid_argument("simulate_fom: initial condition size mismatch");
    const int steps = resolve_step_count(dt, t_final);
    auto [dx, dy] = central_diff_2d(grid);
    ZkStepper stepper(dx, dy, dt);

    SnapshotSet out;
    out.model = to_string(model.kind);
    out.a = grid.x.a;
    out.b = grid.x.b;
    out.nx = grid.x.n;
    out.ny = grid.y.n;
    out.dt = dt;
    out.u.resize(grid.total_dim(), steps + 1);
    out.u.col(0) = u0;
    Vector u = u0;
    for (int n = 0; n < steps; ++n) {
        u = stepper.step(u);
        out.u.col(n + 1) = u;
    }
    return out;
}

}  // namespace msopinf

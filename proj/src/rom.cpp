#include "msopinf/rom.hpp"

#include <Eigen/LU>

#include "msopinf/fom.hpp"
#include "msopinf/storage.hpp"

namespace msopinf {

void RomTrajectory::save(const std::filesystem::path& path) const {
    Container c;
    c.n = static_cast<std::uint64_t>(u.rows());
    c.d = 1 + (v ? 1 : 0) + (w ? 1 : 0);
    c.dt = dt;
    c.nt = static_cast<std::uint64_t>(u.cols());
    c.meta["kind"] = "rom_trajectory";
    c.meta["provenance"] = provenance;
    c.sections.emplace_back("u", u);
    if (v) c.sections.emplace_back("v", *v);
    if (w) c.sections.emplace_back("w", *w);
    c.save(path);
}

RomTrajectory RomTrajectory::load(const std::filesystem::path& path) {
    Container c = Container::load(path);
    RomTrajectory t;
    t.u = c.require("u");
    if (const Matrix* m = c.find("v")) t.v = *m;
    if (const Matrix* m = c.find("w")) t.w = *m;
    t.dt = c.dt;
    if (auto it = c.meta.find("provenance"); it != c.meta.end()) t.provenance = it->second;
    return t;
}

namespace {

Eigen::LLT<Matrix> wave_rom_factor(const Matrix& d, double dt) {
    const Index r = d.rows();
    Matrix m = Matrix::Identity(r, r) - (dt * dt / 4.0) * (d * d);
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw NumericalError("wave rom step matrix factorization failed (should be SPD for skew D)");
    return llt;
}

}  // namespace

Vector rom_step_wave(const Vector& u_prev, const Vector& u_curr, double dt, const Matrix& d) {
    if (u_prev.size() != d.rows() || u_curr.size() != d.rows())
        throw std::invalid_argument("rom_step_wave: dimension mismatch");
    const Matrix d2 = d * d;
    const Eigen::LLT<Matrix> llt = wave_rom_factor(d, dt);
    Vector rhs = 2.0 * u_curr - u_prev + (dt * dt / 4.0) * (d2 * (2.0 * u_curr + u_prev));
    return llt.solve(rhs);
}

WaveRomState rom_wave_coupled_step(const WaveRomState& state, double dt, const Matrix& d) {
    const Matrix d2 = d * d;
    const Eigen::LLT<Matrix> llt = wave_rom_factor(d, dt);
    const double s = dt * dt / 4.0;
    WaveRomState next;
    next.u = llt.solve((state.u + s * (d2 * state.u) + dt * state.v).eval());
    Vector sum = next.u + state.u;
    next.v = state.v + (dt / 2.0) * (d2 * sum);
    next.w = d * sum - state.w;
    return next;
}

namespace {

// r x r matrix of the lifted pointwise product: V^T diag(V u) V
Matrix lifted_product_matrix(const Matrix& basis, const Vector& u_red) {
    const Vector lifted = basis * u_red;
    return basis.transpose() * (lifted.asDiagonal() * basis);
}

Vector linearly_implicit_step(const Vector& u, double dt, const Matrix& advect,
                              const Matrix& lin_half) {
    // solves [I/dt + advect + lin_half] u' = [I/dt - lin_half] u
    const Index r = u.size();
    Matrix a = Matrix::Identity(r, r) / dt + advect + lin_half;
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1e-14))
        throw NumericalError("rom step matrix is singular or ill-conditioned (rcond estimate " +
                             std::to_string(rc) + ")");
    Vector rhs = u / dt - lin_half * u;
    return lu.solve(rhs);
}

}  // namespace

Vector rom_step_kdv(const Vector& u, double dt, const Matrix& d, const Matrix& basis,
                    double eta, double gamma) {
    if (basis.cols() != d.rows() || u.size() != d.rows())
        throw std::invalid_argument("rom_step_kdv: dimension mismatch");
    const Matrix advect = (eta / 2.0) * (d * lifted_product_matrix(basis, u));
    const Matrix lin_half = (gamma * gamma / 2.0) * (d * d * d);
    return linearly_implicit_step(u, dt, advect, lin_half);
}

Vector rom_step_zk(const Vector& u, double dt, const Matrix& dx, const Matrix& dy,
                   const Matrix& basis) {
    if (basis.cols() != dx.rows() || u.size() != dx.rows() || dy.rows() != dx.rows())
        throw std::invalid_argument("rom_step_zk: dimension mismatch");
    const Matrix advect = 0.5 * (dx * lifted_product_matrix(basis, u));
    const Matrix lin_half = 0.5 * (dx * dx * dx + dx * (dy * dy));
    return linearly_implicit_step(u, dt, advect, lin_half);
}

RomTrajectory simulate_rom_wave(const Vector& u0, const Vector& v0, double dt, double t_final,
                                const Matrix& d) {
    const int steps = resolve_step_count(dt, t_final);
    const Index r = d.rows();
    RomTrajectory out;
    out.dt = dt;
    out.u.resize(r, steps + 1);
    Matrix vrec(r, steps + 1), wrec(r, steps + 1);
    out.u.col(0) = u0;
    vrec.col(0) = v0;
    wrec.col(0) = d * u0;
    if (steps >= 1) {
        // startup through the coupled one-step form, then the two-step recurrence;
        // the auxiliaries follow from d_t u = mu_t v and mu_t w = D mu_t u.
        WaveRomState s0{u0, v0, wrec.col(0)};
        WaveRomState s1 = rom_wave_coupled_step(s0, dt, d);
        out.u.col(1) = s1.u;
        vrec.col(1) = s1.v;
        wrec.col(1) = s1.w;
        const Matrix d2 = d * d;
        const Eigen::LLT<Matrix> llt = wave_rom_factor(d, dt);
        const double s = dt * dt / 4.0;
        for (int n = 1; n < steps; ++n) {
            Vector rhs = 2.0 * out.u.col(n) - out.u.col(n - 1) +
                         s * (d2 * (2.0 * out.u.col(n) + out.u.col(n - 1)));
            out.u.col(n + 1) = llt.solve(rhs);
            vrec.col(n + 1) = 2.0 * (out.u.col(n + 1) - out.u.col(n)) / dt - vrec.col(n);
            wrec.col(n + 1) = d * (out.u.col(n + 1) + out.u.col(n)) - wrec.col(n);
        }
    }
    out.v = std::move(vrec);
    out.w = std::move(wrec);
    return out;
}

RomTrajectory simulate_rom_kdv(const Vector& u0, double dt, double t_final, const Matrix& d,
                               const Matrix& basis, double eta, double gamma) {
    const int steps = resolve_step_count(dt, t_final);
    RomTrajectory out;
    out.dt = dt;
    out.u.resize(u0.size(), steps + 1);
    out.u.col(0) = u0;
    for (int n = 0; n < steps; ++n)
        out.u.col(n + 1) = rom_step_kdv(out.u.col(n), dt, d, basis, eta, gamma);
    return out;
}

RomTrajectory simulate_rom_zk(const Vector& u0, double dt, double t_final, const Matrix& dx,
                              const Matrix& dy, const Matrix& basis) {
    const int steps = resolve_step_count(dt, t_final);
    RomTrajectory out;
    out.dt = dt;
    out.u.resize(u0.size(), steps + 1);
    out.u.col(0) = u0;
    for (int n = 0; n < steps; ++n)
        out.u.col(n + 1) = rom_step_zk(out.u.col(n), dt, dx, dy, basis);
    return out;
}

RomTrajectory simulate_rom(const LearnedRom& learned, const Matrix& basis, const Vector& u0,
                           const std::optional<Vector>& v0, double dt, double t_final) {
    RomTrajectory out;
    if (learned.model == "wave") {
        if (!v0) throw std::invalid_argument("simulate_rom: wave requires the reduced initial time derivative");
        out = simulate_rom_wave(u0, *v0, dt, t_final, learned.d_x);
    } else if (learned.model == "kdv") {
        out = simulate_rom_kdv(u0, dt, t_final, learned.d_x, basis, learned.constants.at("eta"),
                               learned.constants.at("gamma"));
    } else if (learned.model == "zk") {
        if (!learned.d_y) throw ConfigError("simulate_rom: zk operator set is missing Dy");
        out = simulate_rom_zk(u0, dt, t_final, learned.d_x, *learned.d_y, basis);
    } else {
        throw ConfigError("simulate_rom: unknown model '" + learned.model + "'");
    }
    return out;
}

}  // namespace msopinf

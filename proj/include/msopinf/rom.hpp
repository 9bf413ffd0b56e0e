#pragma once

#include <Eigen/Cholesky>
#include <filesystem>
#include <optional>
#include <string>

#include "msopinf/opinf.hpp"
#include "msopinf/types.hpp"

namespace msopinf {

/// Reduced-coefficient trajectory, one column per time level. For the wave
/// model the reduced auxiliaries of the coupled one-step form are recorded
/// alongside (needed by the symplecticity diagnostics).
struct RomTrajectory {
    Matrix u;
    std::optional<Matrix> v;
    std::optional<Matrix> w;
    double dt = 0.0;
    std::string provenance;

    int time_count() const { return static_cast<int>(u.cols()); }
    void save(const std::filesystem::path& path) const;
    static RomTrajectory load(const std::filesystem::path& path);
};

/// Two-step wave recurrence: solves
///   (I - (dt^2/4) D^2) u_next = 2 u_curr - u_prev + (dt^2/4) D^2 (2 u_curr + u_prev).
/// The matrix is SPD for skew D.
Vector rom_step_wave(const Vector& u_prev, const Vector& u_curr, double dt, const Matrix& d);

struct WaveRomState {
    Vector u, v, w;
};

/// Coupled one-step wave form (used for startup and for symplecticity tests).
WaveRomState rom_wave_coupled_step(const WaveRomState& state, double dt, const Matrix& d);

/// One linearly implicit Kdv step in reduced coordinates; the nonlinear term
/// lifts through the basis, V^T diag(V u) V, so the r x r matrix is
/// reassembled and refactored every step.
Vector rom_step_kdv(const Vector& u, double dt, const Matrix& d, const Matrix& basis,
                    double eta, double gamma);

Vector rom_step_zk(const Vector& u, double dt, const Matrix& dx, const Matrix& dy,
                   const Matrix& basis);

RomTrajectory simulate_rom_wave(const Vector& u0, const Vector& v0, double dt, double t_final,
                                const Matrix& d);
RomTrajectory simulate_rom_kdv(const Vector& u0, double dt, double t_final, const Matrix& d,
                               const Matrix& basis, double eta, double gamma);
RomTrajectory simulate_rom_zk(const Vector& u0, double dt, double t_final, const Matrix& dx,
                              const Matrix& dy, const Matrix& basis);

/// Dispatches on the learned model kind; wave requires v0.
RomTrajectory simulate_rom(const LearnedRom& learned, const Matrix& basis, const Vector& u0,
                           const std::optional<Vector>& v0, double dt, double t_final);

}  // namespace msopinf

#pragma once

#include <filesystem>
#include <vector>

#include "msopinf/diff_operator.hpp"
#include "msopinf/models.hpp"
#include "msopinf/types.hpp"

namespace msopinf {

/// Polarized discrete energies. Every series has nt-1 entries (the formulas
/// couple consecutive time levels). The schemes conserve them exactly in
/// exact arithmetic, which is what the conservation tests measure.

/// Wave: (dx/6) sum_j [ 2 (Du^n)(Du^{n+1}) + (Du^n)^2 + 2 v^n v^{n+1} + (v^n)^2 ]
/// with v^n = d_t u^n - (dt/4) D^2 (u^{n+1} + u^n); the final v comes from the
/// recorded series when available, otherwise from v^{n+1} = 2 d_t u^n - v^n.
std::vector<double> wave_energy_fom(const Matrix& u, const Matrix& v_recorded, double dt,
                                    double dx, const DiffOperator& d);

/// Reduced mirror with lifted quantities V D u_red and the reduced polarization.
std::vector<double> wave_energy_rom(const Matrix& u_red, double dt, double dx, const Matrix& d,
                                    const Matrix& basis);

/// Kdv: (dx/6) sum_j [ 2 gamma^2 (Du^n)(Du^{n+1}) + gamma^2 (Du^n)^2
///                     - eta (u^n)^2 u^{n+1} ]
std::vector<double> kdv_energy_fom(const Matrix& u, double dx, const DiffOperator& d, double eta,
                                   double gamma);
std::vector<double> kdv_energy_rom(const Matrix& u_red, double dx, const Matrix& d,
                                   const Matrix& basis, double eta, double gamma);

/// Zk: (dx dy/6) sum_jk [ 2 (Dx u^n)(Dx u^{n+1}) + (Dx u^n)^2
///                        + 2 (Dy u^n)(Dy u^{n+1}) + (Dy u^n)^2 - (u^n)^2 u^{n+1} ]
std::vector<double> zk_energy_fom(const Matrix& u, double dx, double dy,
                                  const DiffOperator& dx_op, const DiffOperator& dy_op);
std::vector<double> zk_energy_rom(const Matrix& u_red, double dx, double dy, const Matrix& dx_red,
                                  const Matrix& dy_red, const Matrix& basis);

/// max_n |e_n - e_0| / |e_0|
double relative_drift(const std::vector<double>& series);

struct RelativeErrorSeries {
    std::vector<double> values;          // NaN at undefined indices
    std::vector<int> undefined_indices;  // where the reference entry is zero
};

/// Elementwise |fom - rom| / |fom|; zero reference entries are reported as
/// undefined rather than silently producing inf.
RelativeErrorSeries relative_energy_error(const std::vector<double>& fom,
                                          const std::vector<double>& rom);

struct EnergyReport {
    std::vector<double> time;
    std::vector<double> fom;
    std::vector<double> rom;
    RelativeErrorSeries relative_error;
    double fom_drift = 0.0;
    double rom_drift = 0.0;
};

EnergyReport make_energy_report(double dt, const std::vector<double>& fom,
                                const std::vector<double>& rom);

/// max_n | xi_n^T K_r eta_n - xi_0^T K_r eta_0 | for two coupled-form solution
/// differences, columns = time levels stacked by field blocks.
double symplectic_form_drift(const Matrix& xi, const Matrix& eta, const Matrix& k_red);

/// Discrete residual of the reduced local energy balance of the wave model:
/// E_m^n from the per-coefficient state (u, v, w)_m and the reduced operator,
/// differenced over two intervals with the flux at the center state. Returns
/// the max over m per interior level; a convergence diagnostic, halving dt
/// reduces it by about 2x or better.
std::vector<double> local_energy_residual(const Matrix& u_red, double dt, const Matrix& d,
                                          const MsModel& model);

/// Elementwise |truth - V u_red|.
Matrix state_error_field(const Matrix& truth, const Matrix& u_red, const Matrix& basis);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// CSV exports ("t,value"; long-format fields "x[,y],t,value").
void write_series_csv(const std::filesystem::path& path, const std::vector<double>& time,
                      const std::vector<double>& values);
void write_field_csv_1d(const std::filesystem::path& path, const Vector& x_nodes,
                        const std::vector<double>& time, const Matrix& field);
void write_field_csv_2d(const std::filesystem::path& path, const Vector& x_nodes,
                        const Vector& y_nodes, double t, const Vector& field_at_t);

}  // namespace msopinf

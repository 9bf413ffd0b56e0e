#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msopinf/diff_operator.hpp"
#include "msopinf/storage.hpp"
#include "msopinf/types.hpp"

namespace msopinf {

/// Full-order trajectory of the primary state (u), one column per time level
/// including t = 0; the wave solver also records its auxiliary states v, w.
struct SnapshotSet {
    std::string model;
    double a = 0.0;
    double b = 0.0;
    int nx = 0;
    int ny = 0;  // 0 for 1D models
    double dt = 0.0;
    Matrix u;
    std::optional<Matrix> v;
    std::optional<Matrix> w;
    std::string config_fingerprint;

    bool is_2d() const { return ny > 0; }
    int time_count() const { return static_cast<int>(u.cols()); }
    double spacing() const { return (b - a) / nx; }

    void save(const std::filesystem::path& path) const;
    static SnapshotSet load(const std::filesystem::path& path);
    /// Plain numeric CSV of u: one row per node, one column per time level.
    void export_csv(const std::filesystem::path& path) const;
};

/// Horizontal stacking of all reconstructed state-component trajectories,
/// the input of the basis computation.
struct ExtendedSnapshots {
    Matrix z;  // N x (fields.size() * nt)
    std::vector<std::string> fields;
    int nt = 0;
    std::string source_fingerprint;

    void save(const std::filesystem::path& path) const;
    static ExtendedSnapshots load(const std::filesystem::path& path);
};

/// Wave stacking [u | v | w]: v by the discrete polarization
///   v^n = (u^{n+1} - u^n)/dt - (dt/4) D^2 (u^{n+1} + u^n)
/// (final column from the recorded v when present, otherwise from the
/// one-step relation v^{n+1} = 2 (u^{n+1}-u^n)/dt - v^n), and w^n = D u^n.
ExtendedSnapshots wave_extended(const SnapshotSet& snaps, double dt, const DiffOperator& d);

/// Kdv stacking [phi | u | v | w] with phi the zero-mean potential solve of
/// D phi = u, v = gamma D u, w = (1/2) d_t phi + gamma D v + (eta/2) u.^2
/// (backward difference for d_t phi at the final column).
ExtendedSnapshots kdv_extended(const SnapshotSet& snaps, double dt, const DiffOperator& d,
                               double eta, double gamma);

/// Zk stacking [u | phi] with phi the per-line potential solve of Dx phi = u.
ExtendedSnapshots zk_extended(const SnapshotSet& snaps, const DiffOperator& dx);

}  // namespace msopinf

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <Eigen/QR>
#include <random>

#include "doctest.h"
#include "msopinf/diagnostics.hpp"
#include "msopinf/fom.hpp"
#include "msopinf/opinf.hpp"
#include "msopinf/pod.hpp"
#include "msopinf/rom.hpp"

using namespace msopinf;

namespace {

Matrix random_matrix(Index rows, Index cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    return m;
}

Vector random_vector(Index n, unsigned seed) { return random_matrix(n, 1, seed).col(0); }

Matrix random_orthonormal(Index n, Index r, unsigned seed) {
    return Eigen::HouseholderQR<Matrix>(random_matrix(n, r, seed)).householderQ() *
           Matrix::Identity(n, r);
}

Matrix random_skew(int r, unsigned seed, double scale = 1.0) {
    return skew_from_params(scale * random_vector(skew_param_count(r), seed), r);
}

}  // namespace

TEST_CASE("wave two-step recurrence without operator is free extrapolation") {
    const Vector up = random_vector(5, 1), uc = random_vector(5, 2);
    const Vector next = rom_step_wave(up, uc, 0.1, Matrix::Zero(5, 5));
    CHECK((next - (2.0 * uc - up)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("r = 2 rotation block reduces to a scalar oscillator recurrence") {
    const double a = 1.7, dt = 0.1;
    Matrix d(2, 2);
    d << 0.0, a, -a, 0.0;
    const Vector up = random_vector(2, 3), uc = random_vector(2, 4);
    const Vector got = rom_step_wave(up, uc, dt, d);
    // D^2 = -a^2 I: each coordinate obeys
    //   (1 + s a^2) u+ = 2 uc - up - s a^2 (2 uc + up),  s = dt^2/4
    const double s = dt * dt / 4.0;
    for (int i = 0; i < 2; ++i) {
        const double expect = (2.0 * uc[i] - up[i] - s * a * a * (2.0 * uc[i] + up[i])) /
                              (1.0 + s * a * a);
        CHECK(std::abs(got[i] - expect) <= 1e-14);
    }
}

TEST_CASE("kdv rom step degenerates to the identity without dynamics") {
    const int r = 4;
    const Matrix basis = random_orthonormal(20, r, 5);
    const Vector u = random_vector(r, 6);
    const Vector next = rom_step_kdv(u, 0.1, random_skew(r, 7), basis, 0.0, 0.0);
    CHECK((next - u).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("zk rom step trivial cases") {
    const int r = 4;
    const Matrix basis = random_orthonormal(24, r, 8);
    CHECK(rom_step_zk(Vector::Zero(r), 0.1, random_skew(r, 9), random_skew(r, 10), basis)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    const Vector u = random_vector(r, 11);
    CHECK((rom_step_zk(u, 0.1, Matrix::Zero(r, r), random_skew(r, 12), basis) - u)
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
}

TEST_CASE("full-dimensional reduced steppers reproduce the full-order steppers") {
    // wave, coupled form against the one-step solver
    {
        const PeriodicGrid1D g = make_grid_1d(-5.0, 5.0, 32);
        const DiffOperator d = central_diff_1d(g);
        const Matrix dd = d.dense();
        const WaveStepper fom(d, 0.1);
        for (unsigned seed = 0; seed < 10; ++seed) {
            WaveFomState s{random_vector(32, 100 + seed), random_vector(32, 200 + seed),
                           Vector(dd * random_vector(32, 100 + seed)), 0.0};
            s.w = dd * s.u;
            const WaveFomState f = fom.step(s);
            const WaveRomState r = rom_wave_coupled_step(WaveRomState{s.u, s.v, s.w}, 0.1, dd);
            const double scale = f.u.cwiseAbs().maxCoeff() + 1.0;
            CHECK((f.u - r.u).cwiseAbs().maxCoeff() <= 1e-12 * scale);
            CHECK((f.v - r.v).cwiseAbs().maxCoeff() <= 1e-12 * scale);
            CHECK((f.w - r.w).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        }
    }
    // kdv
    {
        const PeriodicGrid1D g = make_grid_1d(0.0, 2.0, 32);
        const DiffOperator d = central_diff_1d(g);
        KdvStepper fom(d, 0.1, 1.0, 0.022);
        const Matrix eye = Matrix::Identity(32, 32);
        for (unsigned seed = 0; seed < 10; ++seed) {
            const Vector u = 0.5 * random_vector(32, 300 + seed);
            const Vector f = fom.step(u);
            const Vector r = rom_step_kdv(u, 0.1, d.dense(), eye, 1.0, 0.022);
            CHECK((f - r).cwiseAbs().maxCoeff() <= 1e-12 * (f.cwiseAbs().maxCoeff() + 1.0));
        }
    }
    // zk
    {
        const PeriodicGrid2D g = make_grid_2d(0.0, 8.0, 8);
        auto [dx, dy] = central_diff_2d(g);
        ZkStepper fom(dx, dy, 0.05);
        const Matrix eye = Matrix::Identity(64, 64);
        for (unsigned seed = 0; seed < 10; ++seed) {
            const Vector u = 0.5 * random_vector(64, 400 + seed);
            const Vector f = fom.step(u);
            const Vector r = rom_step_zk(u, 0.05, dx.dense(), dy.dense(), eye);
            CHECK((f - r).cwiseAbs().maxCoeff() <= 1e-12 * (f.cwiseAbs().maxCoeff() + 1.0));
        }
    }
}

TEST_CASE("wave rom trajectory: step count, startup consistency, auxiliaries") {
    const int r = 6;
    const Matrix d = random_skew(r, 13);
    const Vector u0 = random_vector(r, 14), v0 = random_vector(r, 15);
    const RomTrajectory t = simulate_rom_wave(u0, v0, 0.1, 20.0, d);
    CHECK(t.time_count() == 201);
    REQUIRE(t.v.has_value());
    REQUIRE(t.w.has_value());

    // recorded states satisfy the coupled one-step relations at every level
    for (int n = 0; n + 1 < 201; ++n) {
        const Vector lhs = (t.u.col(n + 1) - t.u.col(n)) / 0.1;
        const Vector rhs = 0.5 * (t.v->col(n + 1) + t.v->col(n));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * (lhs.cwiseAbs().maxCoeff() + 1.0));
        const Vector wrel = t.w->col(n + 1) + t.w->col(n) - d * (t.u.col(n + 1) + t.u.col(n));
        CHECK(wrel.cwiseAbs().maxCoeff() <= 1e-10);
    }

    CHECK(simulate_rom_wave(u0, v0, 0.1, 0.0, d).time_count() == 1);
}

TEST_CASE("intrusive reduced trajectory stays within the measured truncation envelope") {
    // kdv at a coarse grid: the reduced trajectory with the projected operator
    // follows the projected full trajectory to within a modest multiple of the
    // snapshot truncation error
    const MsModel kdv = make_model(ModelKind::Kdv, {{"eta", 1.0}, {"gamma", 0.022}});
    const PeriodicGrid1D g = make_grid_1d(0.0, 2.0, 128);
    const DiffOperator d = central_diff_1d(g);
    Vector u0(128);
    for (int j = 0; j < 128; ++j) u0[j] = 0.4 / std::cosh(g.node(j) - 1.0);
    const SnapshotSet snaps = simulate_fom(kdv, g, u0, std::nullopt, 0.1, 10.0);

    const ExtendedSnapshots ext = kdv_extended(snaps, 0.1, d, 1.0, 0.022);
    const PodBasis basis = compute_pod(ext.z, 12, 4);
    const Matrix d_red = intrusive_operator(basis.v, d);

    const RomTrajectory rom =
        simulate_rom_kdv(basis.v.transpose() * u0, 0.1, 10.0, d_red, basis.v, 1.0, 0.022);
    const Matrix projected = basis.v.transpose() * snaps.u;
    const double rom_err = (rom.u - projected).cwiseAbs().maxCoeff();
    const double trunc =
        (snaps.u - basis.v * projected).cwiseAbs().maxCoeff();  // truncation envelope
    CHECK(rom_err <= 50.0 * std::max(trunc, 1e-12));
}

TEST_CASE("reduced energies are conserved for arbitrary skew operators") {
    const double dt = 0.1;
    const int n = 48, r = 6;
    for (unsigned seed = 0; seed < 5; ++seed) {
        const Matrix basis = random_orthonormal(n, r, 500 + seed);
        // wave
        {
            const Matrix d = random_skew(r, 600 + seed);
            const RomTrajectory t =
                simulate_rom_wave(0.4 * random_vector(r, 700 + seed),
                                  0.4 * random_vector(r, 800 + seed), dt, 10.0, d);
            const auto e = wave_energy_rom(t.u, dt, 0.05, d, basis);
            CHECK(relative_drift(e) <= 1e-8);
        }
        // kdv
        {
            const Matrix d = random_skew(r, 900 + seed);
            const RomTrajectory t = simulate_rom_kdv(0.3 * random_vector(r, 1000 + seed), dt,
                                                     10.0, d, basis, 1.0, 0.022);
            const auto e = kdv_energy_rom(t.u, 0.05, d, basis, 1.0, 0.022);
            CHECK(relative_drift(e) <= 1e-8);
        }
        // zk
        {
            const Matrix dx = random_skew(r, 1100 + seed);
            const Matrix dy = random_skew(r, 1200 + seed);
            const RomTrajectory t =
                simulate_rom_zk(0.3 * random_vector(r, 1300 + seed), dt, 10.0, dx, dy, basis);
            const auto e = zk_energy_rom(t.u, 0.05, 0.05, dx, dy, basis);
            CHECK(relative_drift(e) <= 1e-8);
        }
    }
}

TEST_CASE("simulate_rom dispatch and persistence") {
    LearnedRom learned;
    learned.model = "wave";
    learned.d_x = random_skew(4, 16);
    const Matrix basis = random_orthonormal(20, 4, 17);
    CHECK_THROWS_AS(
        simulate_rom(learned, basis, random_vector(4, 18), std::nullopt, 0.1, 1.0),
        std::invalid_argument);
    RomTrajectory t = simulate_rom(learned, basis, random_vector(4, 18),
                                   Vector(random_vector(4, 19)), 0.1, 1.0);
    CHECK(t.time_count() == 11);

    t.provenance = "test";
    const auto p = std::filesystem::temp_directory_path() / "msopinf_test" / "rom.msnap";
    std::filesystem::create_directories(p.parent_path());
    t.save(p);
    const RomTrajectory r = RomTrajectory::load(p);
    CHECK(r.u == t.u);
    CHECK(r.provenance == "test");
    REQUIRE(r.v.has_value());
    CHECK(*r.v == *t.v);
}

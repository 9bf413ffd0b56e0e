#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <Eigen/QR>
#include <random>

#include "doctest.h"
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

Vector random_params(Index n, unsigned seed) {
    return random_matrix(n, 1, seed).col(0);
}

Matrix random_orthonormal(Index n, Index r, unsigned seed) {
    return Eigen::HouseholderQR<Matrix>(random_matrix(n, r, seed))
        .householderQ() *
        Matrix::Identity(n, r);
}

// central finite differences of the loss, step 1e-6 * (1 + |theta_i|)
double fd_component(const TrainingData& data, const Vector& theta, Index k) {
    const double h = 1e-6 * (1.0 + std::abs(theta[k]));
    Vector tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    return (loss_and_grad(data, tp).loss - loss_and_grad(data, tm).loss) / (2.0 * h);
}

}  // namespace

TEST_CASE("skew parameterization round trips exactly") {
    for (int r : {1, 2, 5, 33, 128}) {
        const Vector theta = random_params(skew_param_count(r), 100 + r);
        const Matrix d = skew_from_params(theta, r);
        CHECK((d + d.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(unskew(d) == theta);
    }
    CHECK_THROWS_AS(skew_from_params(Vector::Zero(3), 5), std::invalid_argument);
}

TEST_CASE("wave residual: constant data and degenerate dimension") {
    const double dt = 0.1;
    // constant-in-time columns: residual = -D^2 u per column
    const int r = 3;
    Matrix u(r, 5);
    const Vector col = random_params(r, 7);
    for (int n = 0; n < 5; ++n) u.col(n) = col;
    Vector theta = Vector::Zero(3);
    theta[0] = 0.7;  // couples coordinates 0, 1 only; e3 stays in the kernel
    const Matrix d = skew_from_params(theta, r);
    const Matrix res = residual_wave(d, u, dt);
    CHECK(res.cols() == 3);
    for (int n = 0; n < 3; ++n)
        CHECK((res.col(n) + d * (d * col)).cwiseAbs().maxCoeff() <= 1e-14);

    Matrix u_kernel(r, 4);
    for (int n = 0; n < 4; ++n) u_kernel.col(n) = Vector{{0.0, 0.0, 2.0}};
    CHECK(residual_wave(d, u_kernel, dt).cwiseAbs().maxCoeff() == 0.0);

    // r = 1 has no skew parameters: residual is the second time difference
    const Matrix u1 = random_matrix(1, 6, 9);
    const Matrix res1 = residual_wave(skew_from_params(Vector(0), 1), u1, dt);
    const Matrix expect =
        (u1.rightCols(4) - 2.0 * u1.middleCols(1, 4) + u1.leftCols(4)) / (dt * dt);
    CHECK((res1 - expect).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(residual_wave(d, Matrix::Zero(3, 2), dt), std::invalid_argument);
}

TEST_CASE("kdv and zk residual trivial forms") {
    const double dt = 0.2;
    const int r = 4;
    const Matrix u = random_matrix(r, 6, 11);
    const Matrix q = random_matrix(r, 5, 13);
    const Matrix dtu = (u.rightCols(5) - u.leftCols(5)) / dt;

    // eta = 0, gamma = 0 or D = 0: the residual is the forward difference
    const Matrix d = skew_from_params(random_params(6, 15), r);
    CHECK((residual_kdv(d, u, q, dt, 0.0, 0.0) - dtu).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((residual_kdv(Matrix::Zero(r, r), u, q, dt, 1.0, 0.022) - dtu).cwiseAbs().maxCoeff() ==
          0.0);

    // zk: Dy enters only through Dx
    const Matrix dy = skew_from_params(random_params(6, 17), r);
    CHECK((residual_zk(Matrix::Zero(r, r), dy, u, q, dt) - dtu).cwiseAbs().maxCoeff() == 0.0);
    // flipping the sign of Dy leaves the residual bitwise unchanged
    const Matrix dx = skew_from_params(random_params(6, 19), r);
    CHECK(residual_zk(dx, dy, u, q, dt) == residual_zk(dx, Matrix(-dy), u, q, dt));

    CHECK_THROWS_AS(residual_kdv(d, u, random_matrix(r, 4, 21), dt, 1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("kdv residual vanishes on data generated by the reduced recurrence") {
    const int n = 20, r = 4;
    const double dt = 0.05, eta = 1.0, gamma = 0.3;
    const Matrix basis = random_orthonormal(n, r, 23);
    const Matrix d_true = skew_from_params(0.5 * random_params(6, 25), r);

    const int steps = 40;
    Matrix u(r, steps + 1);
    u.col(0) = 0.3 * random_params(r, 27);
    for (int s = 0; s < steps; ++s)
        u.col(s + 1) = rom_step_kdv(u.col(s), dt, d_true, basis, eta, gamma);

    // nonlinear products of the deployed scheme: V^T ((V u^n) o (V u^{n+1}))
    Matrix q(r, steps);
    for (int s = 0; s < steps; ++s) {
        const Vector a = basis * u.col(s);
        const Vector b = basis * u.col(s + 1);
        q.col(s) = basis.transpose() * a.cwiseProduct(b);
    }
    const Matrix res = residual_kdv(d_true, u, q, dt, eta, gamma);
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("zk residual vanishes on data generated by the reduced recurrence") {
    const int n = 30, r = 4;
    const double dt = 0.05;
    const Matrix basis = random_orthonormal(n, r, 29);
    const Matrix dx = skew_from_params(0.4 * random_params(6, 31), r);
    const Matrix dy = skew_from_params(0.4 * random_params(6, 33), r);

    const int steps = 40;
    Matrix u(r, steps + 1);
    u.col(0) = 0.3 * random_params(r, 35);
    for (int s = 0; s < steps; ++s)
        u.col(s + 1) = rom_step_zk(u.col(s), dt, dx, dy, basis);

    Matrix q(r, steps);
    for (int s = 0; s < steps; ++s) {
        const Vector a = basis * u.col(s);
        const Vector b = basis * u.col(s + 1);
        q.col(s) = basis.transpose() * a.cwiseProduct(b);
    }
    CHECK(residual_zk(dx, dy, u, q, dt).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("analytic gradients match central finite differences (50 seeds, all losses)") {
    const int r = 5;
    const Index np = skew_param_count(r);
    for (unsigned seed = 0; seed < 50; ++seed) {
        // dt = 1 keeps the loss O(1) so the finite-difference oracle is not
        // dominated by cancellation in the (large) loss value
        TrainingData wave;
        wave.kind = LossKind::Wave;
        wave.u_red = random_matrix(r, 12, 1000 + seed);
        wave.dt = 1.0;
        const Vector tw = random_params(np, 2000 + seed);
        const LossGrad gw = loss_and_grad(wave, tw);
        for (Index k = 0; k < np; ++k) {
            const double fd = fd_component(wave, tw, k);
            CHECK(std::abs(gw.grad[k] - fd) /
                      std::max({1.0, std::abs(gw.grad[k]), std::abs(fd)}) <=
                  1e-6);
        }

        TrainingData kdv;
        kdv.kind = LossKind::Kdv;
        kdv.u_red = random_matrix(r, 12, 3000 + seed);
        kdv.q = random_matrix(r, 11, 4000 + seed);
        kdv.dt = 1.0;
        kdv.eta = 1.0;
        kdv.gamma = 0.5;
        const Vector tk = random_params(np, 5000 + seed);
        const LossGrad gk = loss_and_grad(kdv, tk);
        for (Index k = 0; k < np; ++k) {
            const double fd = fd_component(kdv, tk, k);
            CHECK(std::abs(gk.grad[k] - fd) /
                      std::max({1.0, std::abs(gk.grad[k]), std::abs(fd)}) <=
                  1e-6);
        }

        TrainingData zk;
        zk.kind = LossKind::Zk;
        zk.u_red = random_matrix(r, 12, 6000 + seed);
        zk.q = random_matrix(r, 11, 7000 + seed);
        zk.dt = 1.0;
        const Vector tz = random_params(2 * np, 8000 + seed);
        const LossGrad gz = loss_and_grad(zk, tz);
        for (Index k = 0; k < 2 * np; ++k) {
            const double fd = fd_component(zk, tz, k);
            CHECK(std::abs(gz.grad[k] - fd) /
                      std::max({1.0, std::abs(gz.grad[k]), std::abs(fd)}) <=
                  1e-6);
        }
    }
}

TEST_CASE("wave gradient at theta = 0 is exactly zero") {
    TrainingData wave;
    wave.kind = LossKind::Wave;
    wave.u_red = random_matrix(6, 10, 51);
    wave.dt = 0.1;
    const LossGrad g = loss_and_grad(wave, Vector::Zero(skew_param_count(6)));
    CHECK(g.grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("doubling the data scales the wave loss and gradient by exactly 4") {
    TrainingData wave;
    wave.kind = LossKind::Wave;
    wave.u_red = random_matrix(5, 9, 53);
    wave.dt = 0.1;
    const Vector theta = random_params(skew_param_count(5), 55);
    const LossGrad g1 = loss_and_grad(wave, theta);
    wave.u_red *= 2.0;
    const LossGrad g2 = loss_and_grad(wave, theta);
    CHECK(g2.loss == 4.0 * g1.loss);
    CHECK(g2.grad == Vector(4.0 * g1.grad));
}

TEST_CASE("train with zero epochs records the initialization only") {
    TrainingData wave;
    wave.kind = LossKind::Wave;
    wave.u_red = random_matrix(4, 10, 57);
    wave.dt = 0.1;
    TrainConfig cfg;
    cfg.max_epochs = 0;
    const LearnedRom a = train(wave, cfg);
    const LearnedRom b = train(wave, cfg);
    CHECK(a.loss_history.size() == 1);
    CHECK(a.d_x == b.d_x);
    CHECK(a.best_loss == b.best_loss);
    CHECK((a.d_x + a.d_x.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training is deterministic for a fixed seed") {
    TrainingData kdv;
    kdv.kind = LossKind::Kdv;
    kdv.u_red = random_matrix(4, 15, 59);
    kdv.q = random_matrix(4, 14, 61);
    kdv.dt = 0.1;
    kdv.eta = 1.0;
    kdv.gamma = 0.3;
    TrainConfig cfg;
    cfg.max_epochs = 200;
    cfg.seed = 42;
    const LearnedRom a = train(kdv, cfg);
    const LearnedRom b = train(kdv, cfg);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.lr_trace == b.lr_trace);
    CHECK(a.d_x == b.d_x);

    TrainConfig other = cfg;
    other.seed = 43;
    CHECK(train(kdv, other).d_x != a.d_x);
}

TEST_CASE("synthetic wave data: training recovers the generating dynamics") {
    const int r = 4;
    const double dt = 0.1;
    const int steps = 200;
    const Matrix d_true = skew_from_params(random_params(skew_param_count(r), 63), r);
    const Vector u0 = random_params(r, 65);
    const Vector v0 = random_params(r, 67);
    const RomTrajectory truth = simulate_rom_wave(u0, v0, dt, dt * steps, d_true);

    TrainingData data;
    data.kind = LossKind::Wave;
    data.u_red = truth.u;
    data.dt = dt;

    // the residual vanishes at the generating operator
    CHECK(residual_wave(d_true, truth.u, dt).cwiseAbs().maxCoeff() <= 1e-10);

    TrainConfig cfg;
    cfg.plateau_threshold = 1e-12;
    cfg.loss_tolerance = 1e-12;
    cfg.plateau_patience = 50;
    cfg.min_lr = 1e-6;
    cfg.max_epochs = 40000;
    const LearnedRom learned = train(data, cfg);
    CHECK(learned.best_loss <= 1e-16);

    // replaying the recurrence from the same initial columns matches the data
    const RomTrajectory replay = simulate_rom_wave(u0, v0, dt, dt * steps, learned.d_x);
    CHECK((replay.u - truth.u).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("non-finite loss aborts with a diagnostic") {
    TrainingData wave;
    wave.kind = LossKind::Wave;
    wave.u_red = random_matrix(4, 8, 69);
    wave.u_red(1, 3) = std::numeric_limits<double>::infinity();
    wave.dt = 0.1;
    TrainConfig cfg;
    cfg.max_epochs = 5;
    CHECK_THROWS_AS(train(wave, cfg), NumericalError);
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.min_lr = 1.0;  // above initial_lr
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    TrainConfig cfg2;
    cfg2.lr_decay_factor = 0.0;
    CHECK_THROWS_AS(cfg2.validate(), ConfigError);
}

TEST_CASE("learned rom persistence") {
    LearnedRom l;
    l.model = "zk";
    l.d_x = skew_from_params(random_params(6, 71), 4);
    l.d_y = skew_from_params(random_params(6, 73), 4);
    l.constants["eta"] = 1.0;
    l.loss_history = {1.0, 0.5, 0.25};
    l.lr_trace = {1e-2, 1e-2, 5e-3};
    l.best_loss = 0.25;
    l.basis_fingerprint = "feed";
    const auto p = std::filesystem::temp_directory_path() / "msopinf_test" / "learned.msnap";
    std::filesystem::create_directories(p.parent_path());
    l.save(p);
    const LearnedRom r = LearnedRom::load(p);
    CHECK(r.d_x == l.d_x);
    REQUIRE(r.d_y.has_value());
    CHECK(*r.d_y == *l.d_y);
    CHECK(r.loss_history == l.loss_history);
    CHECK(r.lr_trace == l.lr_trace);
    CHECK(r.best_loss == l.best_loss);
    CHECK(r.constants.at("eta") == 1.0);
    CHECK(r.model == "zk");
}

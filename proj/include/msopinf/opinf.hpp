#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msopinf/types.hpp"

namespace msopinf {

/// Strict upper triangle (row-major) of an r x r skew matrix; the
/// parameterization makes D = -D^T hold by construction during optimization.
Vector unskew(const Matrix& d);
Matrix skew_from_params(const Vector& theta, int r);
inline Index skew_param_count(int r) { return static_cast<Index>(r) * (r - 1) / 2; }

enum class LossKind { Wave, Kdv, Zk };

/// Projected training data for one of the three discrete residual losses.
/// u_red is r x nt; q (Kdv/Zk) holds the projected nonlinear products
/// V^T (u^n o u^{n+1}), r x (nt-1).
struct TrainingData {
    LossKind kind = LossKind::Wave;
    Matrix u_red;
    Matrix q;
    double dt = 0.0;
    double eta = 1.0;
    double gamma = 1.0;
};

/// Defect of the two-step wave recurrence, columns n = 0..nt-3:
///   (u^{n+2} - 2u^{n+1} + u^n)/dt^2 - D^2 (u^{n+2} + 2u^{n+1} + u^n)/4.
Matrix residual_wave(const Matrix& d, const Matrix& u_red, double dt);

/// Defect of the one-step Kdv recurrence, columns n = 0..nt-2:
///   (u^{n+1} - u^n)/dt + (eta/2) D q^n + gamma^2 D^3 (u^{n+1} + u^n)/2.
Matrix residual_kdv(const Matrix& d, const Matrix& u_red, const Matrix& q, double dt,
                    double eta, double gamma);

/// Zk counterpart with linear part (Dx^3 + Dx Dy^2).
Matrix residual_zk(const Matrix& dx, const Matrix& dy, const Matrix& u_red, const Matrix& q,
                   double dt);

struct LossGrad {
    double loss = 0.0;
    Vector grad;
};

/// Mean of squared residual entries and its exact gradient with respect to
/// the skew parameters (for Zk, theta is the concatenation [theta_x; theta_y]).
LossGrad loss_and_grad(const TrainingData& data, const Vector& theta);

struct TrainConfig {
    double initial_lr = 1e-2;
    double min_lr = 1e-4;
    double plateau_threshold = 1e-6;  // relative improvement threshold of the scheduler
    int plateau_patience = 20;
    double lr_decay_factor = 0.5;
    int max_epochs = 20000;
    double loss_tolerance = 1e-6;     // improvement threshold of the stopping rule
    std::uint64_t seed = 0;

    void validate() const;
};

/// Learned skew reduced operator(s) plus the training record.
struct LearnedRom {
    std::string model;
    Matrix d_x;
    std::optional<Matrix> d_y;
    std::map<std::string, double> constants;
    std::vector<double> loss_history;  // loss at the start of each epoch
    std::vector<double> lr_trace;
    double best_loss = 0.0;
    std::string basis_fingerprint;

    void save(const std::filesystem::path& path) const;
    static LearnedRom load(const std::filesystem::path& path);
};

/// Full-batch Adam (beta1 = 0.9, beta2 = 0.999, eps = 1e-8) with a
/// reduce-on-plateau schedule; returns the best-loss parameters. Training is
/// single-threaded and deterministic for a fixed seed.
LearnedRom train(const TrainingData& data, const TrainConfig& config);

}  // namespace msopinf

#include "msopinf/opinf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "msopinf/storage.hpp"

namespace msopinf {

Vector unskew(const Matrix& d) {
    const Index r = d.rows();
    if (d.cols() != r) throw std::invalid_argument("unskew: matrix must be square");
    Vector theta(skew_param_count(static_cast<int>(r)));
    Index k = 0;
    for (Index i = 0; i < r; ++i)
        for (Index j = i + 1; j < r; ++j) theta[k++] = d(i, j);
    return theta;
}

Matrix skew_from_params(const Vector& theta, int r) {
    if (theta.size() != skew_param_count(r))
        throw std::invalid_argument("skew_from_params: parameter count mismatch");
    Matrix d = Matrix::Zero(r, r);
    Index k = 0;
    for (Index i = 0; i < r; ++i)
        for (Index j = i + 1; j < r; ++j) {
            d(i, j) = theta[k];
            d(j, i) = -theta[k];
            ++k;
        }
    return d;
}

Matrix residual_wave(const Matrix& d, const Matrix& u_red, double dt) {
    const Index nt = u_red.cols();
    if (nt < 3) throw std::invalid_argument("residual_wave: need at least 3 columns");
    if (d.rows() != u_red.rows()) throw std::invalid_argument("residual_wave: dimension mismatch");
    const Matrix a = (u_red.rightCols(nt - 2) - 2.0 * u_red.middleCols(1, nt - 2) +
                      u_red.leftCols(nt - 2)) /
                     (dt * dt);
    const Matrix b = (u_red.rightCols(nt - 2) + 2.0 * u_red.middleCols(1, nt - 2) +
                      u_red.leftCols(nt - 2)) /
                     4.0;
    return a - d * (d * b);
}

Matrix residual_kdv(const Matrix& d, const Matrix& u_red, const Matrix& q, double dt,
                    double eta, double gamma) {
    const Index nt = u_red.cols();
    if (nt < 2) throw std::invalid_argument("residual_kdv: need at least 2 columns");
    if (q.rows() != u_red.rows() || q.cols() != nt - 1)
        throw std::invalid_argument("residual_kdv: q must be r x (nt-1)");
    const Matrix du = (u_red.rightCols(nt - 1) - u_red.leftCols(nt - 1)) / dt;
    const Matrix mu = (u_red.rightCols(nt - 1) + u_red.leftCols(nt - 1)) / 2.0;
    return du + (eta / 2.0) * (d * q) + (gamma * gamma) * (d * (d * (d * mu)));
}

Matrix residual_zk(const Matrix& dx, const Matrix& dy, const Matrix& u_red, const Matrix& q,
                   double dt) {
    const Index nt = u_red.cols();
    if (nt < 2) throw std::invalid_argument("residual_zk: need at least 2 columns");
    if (q.rows() != u_red.rows() || q.cols() != nt - 1)
        throw std::invalid_argument("residual_zk: q must be r x (nt-1)");
    const Matrix du = (u_red.rightCols(nt - 1) - u_red.leftCols(nt - 1)) / dt;
    const Matrix mu = (u_red.rightCols(nt - 1) + u_red.leftCols(nt - 1)) / 2.0;
    return du + 0.5 * (dx * q) + dx * (dx * (dx * mu)) + dx * (dy * (dy * mu));
}

namespace {

// packs the theta-gradient from the matrix gradient: dL/dtheta_ij = G_ij - G_ji
Vector pack_skew_grad(const Matrix& g) {
    const Index r = g.rows();
    Vector out(skew_param_count(static_cast<int>(r)));
    Index k = 0;
    for (Index i = 0; i < r; ++i)
        for (Index j = i + 1; j < r; ++j) out[k++] = g(i, j) - g(j, i);
    return out;
}

}  // namespace

LossGrad loss_and_grad(const TrainingData& data, const Vector& theta) {
    const int r = static_cast<int>(data.u_red.rows());
    const Index np = skew_param_count(r);
    const Index nt = data.u_red.cols();
    LossGrad out;
    switch (data.kind) {
        case LossKind::Wave: {
            const Matrix d = skew_from_params(theta, r);
            const Matrix b = (data.u_red.rightCols(nt - 2) +
                              2.0 * data.u_red.middleCols(1, nt - 2) +
                              data.u_red.leftCols(nt - 2)) /
                             4.0;
            const Matrix res = residual_wave(d, data.u_red, data.dt);
            const double m = static_cast<double>(res.size());
            out.loss = res.squaredNorm() / m;
            const Matrix db = d * b;
            const Matrix g = -(2.0 / m) * (res * db.transpose() +
                                           d.transpose() * (res * b.transpose()));
            out.grad = pack_skew_grad(g);
            return out;
        }
        case LossKind::Kdv: {
            const Matrix d = skew_from_params(theta, r);
            const Matrix mu = (data.u_red.rightCols(nt - 1) + data.u_red.leftCols(nt - 1)) / 2.0;
            const Matrix res = residual_kdv(d, data.u_red, data.q, data.dt, data.eta, data.gamma);
            const double m = static_cast<double>(res.size());
            out.loss = res.squaredNorm() / m;
            const double g2 = data.gamma * data.gamma;
            const Matrix dmu = d * mu;
            const Matrix d2mu = d * dmu;
            Matrix g = (data.eta / 2.0) * (res * data.q.transpose());
            g.noalias() += g2 * (res * d2mu.transpose());
            g.noalias() += g2 * (d.transpose() * (res * dmu.transpose()));
            g.noalias() += g2 * (d.transpose() * (d.transpose() * (res * mu.transpose())));
            g *= 2.0 / m;
            out.grad = pack_skew_grad(g);
            return out;
        }
        case LossKind::Zk: {
            if (theta.size() != 2 * np) throw std::invalid_argument("loss_and_grad: zk needs two parameter blocks");
            const Matrix dx = skew_from_params(theta.head(np), r);
            const Matrix dy = skew_from_params(theta.tail(np), r);
            const Matrix mu = (data.u_red.rightCols(nt - 1) + data.u_red.leftCols(nt - 1)) / 2.0;
            const Matrix res = residual_zk(dx, dy, data.u_red, data.q, data.dt);
            const double m = static_cast<double>(res.size());
            out.loss = res.squaredNorm() / m;
            const Matrix dxmu = dx * mu;
            const Matrix dx2mu = dx * dxmu;
            const Matrix dymu = dy * mu;
            const Matrix dy2mu = dy * dymu;
            Matrix gx = 0.5 * (res * data.q.transpose());
            gx.noalias() += res * dx2mu.transpose();
            gx.noalias() += dx.transpose() * (res * dxmu.transpose());
            gx.noalias() += dx.transpose() * (dx.transpose() * (res * mu.transpose()));
            gx.noalias() += res * dy2mu.transpose();
            gx *= 2.0 / m;
            Matrix gy = dx.transpose() * (res * dymu.transpose());
            gy.noalias() += dy.transpose() * (dx.transpose() * (res * mu.transpose()));
            gy *= 2.0 / m;
            out.grad.resize(2 * np);
            out.grad.head(np) = pack_skew_grad(gx);
            out.grad.tail(np) = pack_skew_grad(gy);
            return out;
        }
    }
    throw std::invalid_argument("loss_and_grad: invalid loss kind");
}

void TrainConfig::validate() const {
    if (!(initial_lr > 0) || !(min_lr > 0)) throw ConfigError("train: learning rates must be positive");
    if (min_lr > initial_lr) throw ConfigError("train: min_lr must not exceed initial_lr");
    if (!(plateau_threshold >= 0) || !(loss_tolerance >= 0))
        throw ConfigError("train: thresholds must be non-negative");
    if (plateau_patience < 1) throw ConfigError("train: patience must be at least 1");
    if (!(lr_decay_factor > 0) || lr_decay_factor > 1)
        throw ConfigError("train: decay factor must be in (0, 1]");
    if (max_epochs < 0) throw ConfigError("train: max_epochs must be non-negative");
}

namespace {

// Box-Muller on top of mt19937_64; avoids the implementation-defined
// std::normal_distribution so runs are reproducible bit-for-bit.
double standard_normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

LearnedRom train(const TrainingData& data, const TrainConfig& config) {
    config.validate();
    const int r = static_cast<int>(data.u_red.rows());
    const Index np = skew_param_count(r) * (data.kind == LossKind::Zk ? 2 : 1);

    // theta = 0 is a stationary point of the wave loss; a small random
    // initialization escapes it deterministically.
    std::mt19937_64 rng(config.seed);
    Vector theta(np);
    for (Index i = 0; i < np; ++i) theta[i] = 1e-2 * standard_normal(rng);

    Vector m = Vector::Zero(np), v = Vector::Zero(np);
    constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

    LearnedRom out;
    out.best_loss = std::numeric_limits<double>::infinity();
    Vector best_theta = theta;
    double lr = config.initial_lr;
    double sched_best = std::numeric_limits<double>::infinity();
    double stop_best = std::numeric_limits<double>::infinity();
    int sched_bad = 0, stop_bad = 0;

    auto check_finite = [](double loss, int epoch) {
        if (!std::isfinite(loss)) {
            std::ostringstream msg;
            msg << "training aborted: non-finite loss at epoch " << epoch;
            throw NumericalError(msg.str());
        }
    };

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const LossGrad lg = loss_and_grad(data, theta);
        check_finite(lg.loss, epoch);
        out.loss_history.push_back(lg.loss);
        out.lr_trace.push_back(lr);
        if (lg.loss < out.best_loss) {
            out.best_loss = lg.loss;
            best_theta = theta;
        }
        if (lg.loss < sched_best * (1.0 - config.plateau_threshold)) {
            sched_best = lg.loss;
            sched_bad = 0;
        } else {
            ++sched_bad;
        }
        if (lg.loss < stop_best * (1.0 - config.loss_tolerance)) {
            stop_best = lg.loss;
            stop_bad = 0;
        } else {
            ++stop_bad;
        }
        if (sched_bad >= config.plateau_patience) {
            lr = std::max(lr * config.lr_decay_factor, config.min_lr);
            sched_bad = 0;
        }
        if (lr <= config.min_lr && stop_bad >= 2 * config.plateau_patience) break;

        const double bc1 = 1.0 - std::pow(beta1, epoch);
        const double bc2 = 1.0 - std::pow(beta2, epoch);
        for (Index i = 0; i < np; ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * lg.grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * lg.grad[i] * lg.grad[i];
            theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + adam_eps);
        }
    }

    // the final iterate is otherwise never evaluated
    const LossGrad last = loss_and_grad(data, theta);
    check_finite(last.loss, config.max_epochs);
    out.loss_history.push_back(last.loss);
    out.lr_trace.push_back(lr);
    if (last.loss < out.best_loss) {
        out.best_loss = last.loss;
        best_theta = theta;
    }

    const Index half = skew_param_count(r);
    if (data.kind == LossKind::Zk) {
        out.d_x = skew_from_params(best_theta.head(half), r);
        out.d_y = skew_from_params(best_theta.tail(half), r);
    } else {
        out.d_x = skew_from_params(best_theta, r);
    }
    return out;
}

void LearnedRom::save(const std::filesystem::path& path) const {
    Container c;
    c.model = model;
    c.n = static_cast<std::uint64_t>(d_x.rows());
    c.d = d_y ? 2 : 1;
    c.nt = static_cast<std::uint64_t>(loss_history.size());
    c.meta["kind"] = "learned_rom";
    c.meta["basis_fingerprint"] = basis_fingerprint;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", best_loss);
    c.meta["best_loss"] = buf;
    for (const auto& [k, v] : constants) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        c.meta["constant." + k] = buf;
    }
    c.sections.emplace_back("Dx", d_x);
    if (d_y) c.sections.emplace_back("Dy", *d_y);
    Matrix hist(loss_history.size(), 2);
    for (std::size_t i = 0; i < loss_history.size(); ++i) {
        hist(static_cast<Index>(i), 0) = loss_history[i];
        hist(static_cast<Index>(i), 1) = lr_trace[i];
    }
    c.sections.emplace_back("history", hist);
    c.save(path);
}

LearnedRom LearnedRom::load(const std::filesystem::path& path) {
    Container c = Container::load(path);
    LearnedRom l;
    l.model = c.model;
    l.d_x = c.require("Dx");
    if (const Matrix* dy = c.find("Dy")) l.d_y = *dy;
    l.best_loss = std::stod(c.meta.at("best_loss"));
    if (auto it = c.meta.find("basis_fingerprint"); it != c.meta.end())
        l.basis_fingerprint = it->second;
    for (const auto& [k, v] : c.meta)
        if (k.rfind("constant.", 0) == 0) l.constants[k.substr(9)] = std::stod(v);
    const Matrix& hist = c.require("history");
    for (Index i = 0; i < hist.rows(); ++i) {
        l.loss_history.push_back(hist(i, 0));
        l.lr_trace.push_back(hist(i, 1));
    }
    return l;
}

}  // namespace msopinf

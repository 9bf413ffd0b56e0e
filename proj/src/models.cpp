#include "msopinf/models.hpp"

namespace msopinf {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Wave: return "wave";
        case ModelKind::Kdv: return "kdv";
        case ModelKind::Zk: return "zk";
    }
    throw ConfigError("invalid model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "wave") return ModelKind::Wave;
    if (name == "kdv") return ModelKind::Kdv;
    if (name == "zk") return ModelKind::Zk;
    throw ConfigError("unknown model name: '" + name + "' (expected wave, kdv or zk)");
}

namespace {

double require_constant(const std::map<std::string, double>& constants, const std::string& key,
                        const std::string& model) {
    auto it = constants.find(key);
    if (it == constants.end())
        throw ConfigError("model '" + model + "' requires constant '" + key + "'");
    return it->second;
}

}  // namespace

double MsModel::hamiltonian(const Vector& z) const {
    if (z.size() != state_dim) throw std::invalid_argument("hamiltonian: state dimension mismatch");
    switch (kind) {
        case ModelKind::Wave: {
            // S = (v^2 - w^2/c^2) / 2; with the fixed K, L above this realizes
            // u_tt = c^2 u_xx (w = c^2 u_x). Identical to the c = 1 form when c = 1.
            const double c = constants.at("c");
            const double v = z[1], w = z[2];
            return 0.5 * (v * v - w * w / (c * c));
        }
        case ModelKind::Kdv: {
            const double eta = constants.at("eta");
            const double u = z[1], v = z[2], w = z[3];
            return 0.5 * v * v - u * w + eta * u * u * u / 6.0;
        }
        case ModelKind::Zk: {
            const double p = z[0], u = z[1], v = z[4], w = z[5];
            return u * p - 0.5 * (v * v + w * w) - u * u * u / 6.0;
        }
    }
    throw ConfigError("invalid model kind");
}

Vector MsModel::hamiltonian_grad(const Vector& z) const {
    if (z.size() != state_dim) throw std::invalid_argument("hamiltonian_grad: state dimension mismatch");
    Vector g = Vector::Zero(state_dim);
    switch (kind) {
        case ModelKind::Wave: {
            const double c = constants.at("c");
            g[1] = z[1];
            g[2] = -z[2] / (c * c);
            return g;
        }
        case ModelKind::Kdv: {
            const double eta = constants.at("eta");
            g[1] = -z[3] + 0.5 * eta * z[1] * z[1];
            g[2] = z[2];
            g[3] = -z[1];
            return g;
        }
        case ModelKind::Zk: {
            g[0] = z[1];
            g[1] = z[0] - 0.5 * z[1] * z[1];
            g[4] = -z[4];
            g[5] = -z[5];
            return g;
        }
    }
    throw ConfigError("invalid model kind");
}

MsModel make_model(ModelKind kind, const std::map<std::string, double>& constants) {
    MsModel m;
    m.kind = kind;
    switch (kind) {
        case ModelKind::Wave: {
            m.state_dim = 3;
            m.constants["c"] = require_constant(constants, "c", "wave");
            m.k_mat = Matrix::Zero(3, 3);
            m.k_mat(0, 1) = -1.0;
            m.k_mat(1, 0) = 1.0;
            m.l_mat = Matrix::Zero(3, 3);
            m.l_mat(0, 2) = 1.0;
            m.l_mat(2, 0) = -1.0;
            break;
        }
        case ModelKind::Kdv: {
            m.state_dim = 4;
            const double eta = require_constant(constants, "eta", "kdv");
            const double gamma = require_constant(constants, "gamma", "kdv");
            m.constants["eta"] = eta;
            m.constants["gamma"] = gamma;
            m.k_mat = Matrix::Zero(4, 4);
            m.k_mat(0, 1) = 0.5;
            m.k_mat(1, 0) = -0.5;
            m.l_mat = Matrix::Zero(4, 4);
            m.l_mat(0, 3) = 1.0;
            m.l_mat(1, 2) = -gamma;
            m.l_mat(2, 1) = gamma;
            m.l_mat(3, 0) = -1.0;
            break;
        }
        case ModelKind::Zk: {
            m.state_dim = 6;
            m.k_mat = Matrix::Zero(6, 6);
            m.k_mat(1, 3) = 0.5;
            m.k_mat(3, 1) = -0.5;
            m.l_mat = Matrix::Zero(6, 6);
            m.l_mat(0, 3) = 1.0;
            m.l_mat(1, 4) = 1.0;
            m.l_mat(2, 5) = 1.0;
            m.l_mat(3, 0) = -1.0;
            m.l_mat(4, 1) = -1.0;
            m.l_mat(5, 2) = -1.0;
            Matrix l2 = Matrix::Zero(6, 6);
            l2(1, 5) = 1.0;
            l2(2, 4) = -1.0;
            l2(4, 2) = 1.0;
            l2(5, 1) = -1.0;
            m.l2_mat = l2;
            break;
        }
    }
    return m;
}

Vector eval_grad_S(const MsModel& model, const Vector& z_node) {
    return model.hamiltonian_grad(z_node);
}

}  // namespace msopinf

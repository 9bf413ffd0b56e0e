#pragma once

#include <map>
#include <optional>
#include <string>

#include "msopinf/types.hpp"

namespace msopinf {

enum class ModelKind { Wave, Kdv, Zk };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// A first-order PDE system  K z_t + L z_x (+ L2 z_y) = grad S(z)  with
/// skew-symmetric K, L acting on the per-node state z in R^d.
///
/// State orderings:
///   Wave: z = (u, v, w),          d = 3
///   Kdv:  z = (phi, u, v, w),     d = 4
///   Zk:   z = (p, u, q, phi, v, w), d = 6
struct MsModel {
    ModelKind kind;
    int state_dim;
    Matrix k_mat;                 // d x d, skew
    Matrix l_mat;                 // d x d, skew (x-direction)
    std::optional<Matrix> l2_mat; // d x d, skew (y-direction, Zk only)
    std::map<std::string, double> constants;

    /// Hamiltonian density S at one spatial node.
    double hamiltonian(const Vector& z_node) const;
    /// grad_z S at one spatial node.
    Vector hamiltonian_grad(const Vector& z_node) const;
};

/// Builds one of the three supported models. Required constants:
/// Wave: c; Kdv: eta, gamma; Zk: none.
MsModel make_model(ModelKind kind, const std::map<std::string, double>& constants);

Vector eval_grad_S(const MsModel& model, const Vector& z_node);

}  // namespace msopinf

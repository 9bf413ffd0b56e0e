#pragma once

#include <filesystem>

#include "msopinf/diff_operator.hpp"
#include "msopinf/types.hpp"

namespace msopinf {

/// Orthonormal basis of leading left singular vectors of an extended
/// snapshot matrix, shared by all state components through I_d (x) V.
struct PodBasis {
    Matrix v;                // N x r
    Vector singular_values;  // full spectrum of the decomposed matrix
    int r = 0;
    int block_multiplicity = 1;  // d
    double retained_energy = 0.0;

    void save(const std::filesystem::path& path) const;
    static PodBasis load(const std::filesystem::path& path);
};

/// Leading r left singular vectors with a deterministic sign convention:
/// the largest-magnitude entry of each basis vector is made positive.
PodBasis compute_pod(const Matrix& z, int r, int block_multiplicity = 1);

Matrix project(const Matrix& basis, const Matrix& x);
Matrix lift(const Matrix& basis, const Matrix& x);

/// Galerkin projection V^T D V, exactly skew-symmetrized: (A - A^T)/2.
Matrix intrusive_operator(const Matrix& basis, const DiffOperator& d);

}  // namespace msopinf

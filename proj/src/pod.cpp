#include "msopinf/pod.hpp"

#include <Eigen/SVD>

#include "msopinf/storage.hpp"

namespace msopinf {

void PodBasis::save(const std::filesystem::path& path) const {
    Container c;
    c.n = static_cast<std::uint64_t>(v.rows());
    c.d = static_cast<std::uint64_t>(block_multiplicity);
    c.nt = 0;
    c.meta["kind"] = "basis";
    c.meta["r"] = std::to_string(r);
    c.meta["retained_energy"] = std::to_string(retained_energy);
    c.sections.emplace_back("V", v);
    c.sections.emplace_back("sigma", Matrix(singular_values));
    c.save(path);
}

PodBasis PodBasis::load(const std::filesystem::path& path) {
    Container c = Container::load(path);
    PodBasis b;
    b.v = c.require("V");
    b.singular_values = c.require("sigma").col(0);
    b.r = std::stoi(c.meta.at("r"));
    b.block_multiplicity = static_cast<int>(c.d);
    b.retained_energy = std::stod(c.meta.at("retained_energy"));
    return b;
}

PodBasis compute_pod(const Matrix& z, int r, int block_multiplicity) {
    const Index max_rank = std::min(z.rows(), z.cols());
    if (r < 1 || r > max_rank) throw std::invalid_argument("compute_pod: r out of range");

    Eigen::BDCSVD<Matrix> svd(z, Eigen::ComputeThinU);
    PodBasis b;
    b.singular_values = svd.singularValues();
    b.r = r;
    b.block_multiplicity = block_multiplicity;
    b.v = svd.matrixU().leftCols(r);
    for (Index i = 0; i < r; ++i) {
        Index k;
        b.v.col(i).cwiseAbs().maxCoeff(&k);
        if (b.v(k, i) < 0.0) b.v.col(i) = -b.v.col(i);
    }
    const double total = b.singular_values.squaredNorm();
    b.retained_energy = total > 0 ? b.singular_values.head(r).squaredNorm() / total : 1.0;
    return b;
}

Matrix project(const Matrix& basis, const Matrix& x) {
    if (x.rows() != basis.rows()) throw std::invalid_argument("project: dimension mismatch");
    return basis.transpose() * x;
}

Matrix lift(const Matrix& basis, const Matrix& x) {
    if (x.rows() != basis.cols()) throw std::invalid_argument("lift: dimension mismatch");
    return basis * x;
}

Matrix intrusive_operator(const Matrix& basis, const DiffOperator& d) {
    if (basis.rows() != d.dim()) throw std::invalid_argument("intrusive_operator: dimension mismatch");
    Matrix a = basis.transpose() * d.apply_columns(basis);
    return 0.5 * (a - a.transpose()).eval();
}

}  // namespace msopinf

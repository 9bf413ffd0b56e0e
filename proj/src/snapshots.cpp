#include "msopinf/snapshots.hpp"

#include <cstdio>
#include <fstream>

namespace msopinf {

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

void SnapshotSet::save(const std::filesystem::path& path) const {
    Container c;
    c.model = model;
    c.n = static_cast<std::uint64_t>(u.rows());
    c.d = 1 + (v ? 1 : 0) + (w ? 1 : 0);
    c.dt = dt;
    c.nt = static_cast<std::uint64_t>(u.cols());
    c.meta["kind"] = "snapshots";
    c.meta["a"] = std::to_string(a);
    c.meta["b"] = std::to_string(b);
    c.meta["nx"] = std::to_string(nx);
    c.meta["ny"] = std::to_string(ny);
    c.meta["config_fingerprint"] = config_fingerprint;
    c.sections.emplace_back("u", u);
    if (v) c.sections.emplace_back("v", *v);
    if (w) c.sections.emplace_back("w", *w);
    c.save(path);
}

SnapshotSet SnapshotSet::load(const std::filesystem::path& path) {
    Container c = Container::load(path);
    SnapshotSet s;
    s.model = c.model;
    s.dt = c.dt;
    s.a = std::stod(c.meta.at("a"));
    s.b = std::stod(c.meta.at("b"));
    s.nx = std::stoi(c.meta.at("nx"));
    s.ny = std::stoi(c.meta.at("ny"));
    if (auto it = c.meta.find("config_fingerprint"); it != c.meta.end())
        s.config_fingerprint = it->second;
    s.u = c.require("u");
    if (const Matrix* m = c.find("v")) s.v = *m;
    if (const Matrix* m = c.find("w")) s.w = *m;
    return s;
}

void SnapshotSet::export_csv(const std::filesystem::path& path) const {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw ConfigError("cannot open for writing: " + path.string());
    for (Index i = 0; i < u.rows(); ++i) {
        for (Index j = 0; j < u.cols(); ++j)
            std::fprintf(f, j ? ",%.17g" : "%.17g", u(i, j));
        std::fputc('\n', f);
    }
    std::fclose(f);
}

void ExtendedSnapshots::save(const std::filesystem::path& path) const {
    Container c;
    c.model = "";
    c.n = static_cast<std::uint64_t>(z.rows());
    c.d = fields.size();
    c.nt = static_cast<std::uint64_t>(nt);
    c.meta["kind"] = "extended";
    c.meta["fields"] = join(fields, ',');
    c.meta["source_fingerprint"] = source_fingerprint;
    c.sections.emplace_back("z", z);
    c.save(path);
}

ExtendedSnapshots ExtendedSnapshots::load(const std::filesystem::path& path) {
    Container c = Container::load(path);
    ExtendedSnapshots e;
    e.z = c.require("z");
    e.fields = split(c.meta.at("fields"), ',');
    e.nt = static_cast<int>(c.nt);
    if (auto it = c.meta.find("source_fingerprint"); it != c.meta.end())
        e.source_fingerprint = it->second;
    return e;
}

ExtendedSnapshots wave_extended(const SnapshotSet& snaps, double dt, const DiffOperator& d) {
    const Matrix& u = snaps.u;
    const Index nt = u.cols();
    if (nt < 2) throw std::invalid_argument("wave_extended: need at least 2 time levels");
    if (u.rows() != d.dim()) throw std::invalid_argument("wave_extended: grid/operator mismatch");

    const DiffOperator d2 = d.pow(2);
    Matrix v(u.rows(), nt);
    for (Index n = 0; n + 1 < nt; ++n)
        v.col(n) = (u.col(n + 1) - u.col(n)) / dt -
                   (dt / 4.0) * d2.apply(Vector(u.col(n + 1) + u.col(n)));
    if (snaps.v && snaps.v->cols() == nt)
        v.col(nt - 1) = snaps.v->col(nt - 1);
    else
        v.col(nt - 1) = 2.0 * (u.col(nt - 1) - u.col(nt - 2)) / dt - v.col(nt - 2);

    ExtendedSnapshots e;
    e.fields = {"u", "v", "w"};
    e.nt = static_cast<int>(nt);
    e.source_fingerprint = snaps.config_fingerprint;
    e.z.resize(u.rows(), 3 * nt);
    e.z.leftCols(nt) = u;
    e.z.middleCols(nt, nt) = v;
    e.z.rightCols(nt) = d.apply_columns(u);
    return e;
}

ExtendedSnapshots kdv_extended(const SnapshotSet& snaps, double dt, const DiffOperator& d,
                               double eta, double gamma) {
    const Matrix& u = snaps.u;
    const Index nt = u.cols();
    if (nt < 2) throw std::invalid_argument("kdv_extended: need at least 2 time levels");
    if (u.rows() != d.dim()) throw std::invalid_argument("kdv_extended: grid/operator mismatch");

    Matrix phi = d.solve_potential_columns(u);
    Matrix v = gamma * d.apply_columns(u);
    Matrix dphi(u.rows(), nt);
    dphi.leftCols(nt - 1) = (phi.rightCols(nt - 1) - phi.leftCols(nt - 1)) / dt;
    dphi.col(nt - 1) = (phi.col(nt - 1) - phi.col(nt - 2)) / dt;
    Matrix w = 0.5 * dphi + gamma * d.apply_columns(v) + (eta / 2.0) * u.cwiseProduct(u);

    ExtendedSnapshots e;
    e.fields = {"phi", "u", "v", "w"};
    e.nt = static_cast<int>(nt);
    e.source_fingerprint = snaps.config_fingerprint;
    e.z.resize(u.rows(), 4 * nt);
    e.z.leftCols(nt) = phi;
    e.z.middleCols(nt, nt) = u;
    e.z.middleCols(2 * nt, nt) = v;
    e.z.rightCols(nt) = w;
    return e;
}

ExtendedSnapshots zk_extended(const SnapshotSet& snaps, const DiffOperator& dx) {
    const Matrix& u = snaps.u;
    if (u.rows() != dx.dim()) throw std::invalid_argument("zk_extended: grid/operator mismatch");
    if (u.cols() < 1) throw std::invalid_argument("zk_extended: empty snapshot set");

    ExtendedSnapshots e;
    e.fields = {"u", "phi"};
    e.nt = static_cast<int>(u.cols());
    e.source_fingerprint = snaps.config_fingerprint;
    e.z.resize(u.rows(), 2 * u.cols());
    e.z.leftCols(u.cols()) = u;
    e.z.rightCols(u.cols()) = dx.solve_potential_columns(u);
    return e;
}

}  // namespace msopinf

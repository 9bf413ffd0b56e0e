#include "msopinf/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "msopinf/diagnostics.hpp"
#include "msopinf/diff_operator.hpp"
#include "msopinf/fom.hpp"
#include "msopinf/pod.hpp"
#include "msopinf/rom.hpp"
#include "msopinf/snapshots.hpp"
#include "msopinf/storage.hpp"

namespace msopinf {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

InitialState preset_initial_condition(const std::string& name,
                                      const std::map<std::string, double>& params,
                                      const PeriodicGrid1D& grid) {
    InitialState out;
    if (name == "wave-sech") {
        const double amp = param_or(params, "amplitude", 1.0);
        const double center = param_or(params, "center", 0.0);
        out.u0.resize(grid.n);
        for (int j = 0; j < grid.n; ++j) out.u0[j] = amp * sech(grid.node(j) - center);
        out.v0 = Vector::Zero(grid.n);
        return out;
    }
    if (name == "kdv-sech") {
        const double amp = param_or(params, "amplitude", 0.4);
        const double center = param_or(params, "center", 0.5 * (grid.a + grid.b));
        out.u0.resize(grid.n);
        for (int j = 0; j < grid.n; ++j) out.u0[j] = amp * sech(grid.node(j) - center);
        return out;
    }
    throw ConfigError("unknown 1D initial-condition preset '" + name + "'");
}

InitialState preset_initial_condition(const std::string& name,
                                      const std::map<std::string, double>& params,
                                      const PeriodicGrid2D& grid) {
    if (name != "zk-double-soliton")
        throw ConfigError("unknown 2D initial-condition preset '" + name + "'");
    const double eps = param_or(params, "eps", 0.01);
    const double theta = param_or(params, "theta", 0.0);
    const double c[2] = {param_or(params, "c1", 0.45), param_or(params, "c2", 0.25)};
    const double xs[2] = {param_or(params, "x1", 2.5), param_or(params, "x2", 3.3)};
    const double ys[2] = {param_or(params, "y1", 0.0), param_or(params, "y2", 0.0)};

    InitialState out;
    out.u0.resize(grid.total_dim());
    for (int k = 0; k < grid.y.n; ++k)
        for (int j = 0; j < grid.x.n; ++j) {
            const double x = grid.x.node(j), y = grid.y.node(k);
            double val = 0.0;
            for (int s = 0; s < 2; ++s) {
                const double arg = 0.5 * std::sqrt(c[s] / eps) *
                                   ((x - xs[s]) * std::cos(theta) + (y - ys[s]) * std::sin(theta));
                const double sc = sech(arg);
                val += 3.0 * c[s] * sc * sc;
            }
            out.u0[grid.flat_index(j, k)] = val;
        }
    return out;
}

void ExperimentConfig::validate() const {
    model_kind_from_string(model_name);  // throws on unknown
    if (grid_dims != 1 && grid_dims != 2) throw ConfigError("config: grid dimensions must be 1 or 2");
    if (grid_n < 4) throw ConfigError("config: grid needs at least 4 nodes per axis");
    if (!(grid_b > grid_a)) throw ConfigError("config: grid requires b > a");
    if (!(dt > 0)) throw ConfigError("config: dt must be positive");
    if (t_train > t_eval) throw ConfigError("config: training horizon exceeds evaluation horizon");
    if (t_train < 0) throw ConfigError("config: training horizon must be non-negative");
    if (reduced_dim < 1) throw ConfigError("config: reduced dimension must be at least 1");
    if (ic_preset.empty()) throw ConfigError("config: missing initial-condition preset");
    if (output_dir.empty()) throw ConfigError("config: missing output directory");
    train.validate();
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    j["model"] = {{"name", model_name}, {"constants", constants}};
    j["grid"] = {{"a", grid_a}, {"b", grid_b}, {"n", grid_n}, {"dimensions", grid_dims}};
    j["initial_condition"] = {{"preset", ic_preset}, {"params", ic_params}};
    j["dt"] = dt;
    j["t_train"] = t_train;
    j["t_eval"] = t_eval;
    j["reduced_dim"] = reduced_dim;
    j["train"] = {{"initial_lr", train.initial_lr},
                  {"min_lr", train.min_lr},
                  {"plateau_threshold", train.plateau_threshold},
                  {"plateau_patience", train.plateau_patience},
                  {"lr_decay_factor", train.lr_decay_factor},
                  {"max_epochs", train.max_epochs},
                  {"loss_tolerance", train.loss_tolerance},
                  {"seed", train.seed}};
    j["output_dir"] = output_dir.string();
    j["seed"] = seed;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    try {
        c.model_name = j.at("model").at("name").get<std::string>();
        if (j.at("model").contains("constants"))
            c.constants = j.at("model").at("constants").get<std::map<std::string, double>>();
        const json& g = j.at("grid");
        c.grid_a = g.at("a").get<double>();
        c.grid_b = g.at("b").get<double>();
        c.grid_n = g.at("n").get<int>();
        c.grid_dims = g.value("dimensions", c.model_name == "zk" ? 2 : 1);
        const json& ic = j.at("initial_condition");
        c.ic_preset = ic.at("preset").get<std::string>();
        if (ic.contains("params"))
            c.ic_params = ic.at("params").get<std::map<std::string, double>>();
        c.dt = j.at("dt").get<double>();
        c.t_train = j.at("t_train").get<double>();
        c.t_eval = j.at("t_eval").get<double>();
        c.reduced_dim = j.at("reduced_dim").get<int>();
        c.seed = j.value("seed", std::uint64_t{0});
        c.train.seed = c.seed;
        if (j.contains("train")) {
            const json& t = j.at("train");
            c.train.initial_lr = t.value("initial_lr", c.train.initial_lr);
            c.train.min_lr = t.value("min_lr", c.train.min_lr);
            c.train.plateau_threshold = t.value("plateau_threshold", c.train.plateau_threshold);
            c.train.plateau_patience = t.value("plateau_patience", c.train.plateau_patience);
            c.train.lr_decay_factor = t.value("lr_decay_factor", c.train.lr_decay_factor);
            c.train.max_epochs = t.value("max_epochs", c.train.max_epochs);
            c.train.loss_tolerance = t.value("loss_tolerance", c.train.loss_tolerance);
            c.train.seed = t.value("seed", c.train.seed);
        }
        c.output_dir = j.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string ExperimentConfig::fingerprint() const {
    ordered_json j = to_json();
    j.erase("output_dir");
    return fingerprint_string(j.dump());
}

MsModel ExperimentConfig::model() const {
    return make_model(model_kind_from_string(model_name), constants);
}

PeriodicGrid1D ExperimentConfig::grid_1d() const { return make_grid_1d(grid_a, grid_b, grid_n); }

PeriodicGrid2D ExperimentConfig::grid_2d() const { return make_grid_2d(grid_a, grid_b, grid_n); }

int ExperimentConfig::train_columns() const { return resolve_step_count(dt, t_train) + 1; }

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    ExperimentConfig c = ExperimentConfig::from_json(j);
    if (const char* out = std::getenv("MSOPINF_OUT"); out && *out) c.output_dir = out;
    return c;
}

namespace {

struct Paths {
    fs::path snapshots, extended, basis, learned, learned_json, rom, rom_intrusive;
    explicit Paths(const fs::path& dir)
        : snapshots(dir / "snapshots.msnap"),
          extended(dir / "extended.msnap"),
          basis(dir / "basis.msnap"),
          learned(dir / "learned.msnap"),
          learned_json(dir / "learned.json"),
          rom(dir / "rom.msnap"),
          rom_intrusive(dir / "rom_intrusive.msnap") {}
};

fs::path resolve_input(const StageInputs& inputs, const std::string& key, const fs::path& dflt) {
    auto it = inputs.find(key);
    return it == inputs.end() ? dflt : it->second;
}

ExtendedSnapshots build_extended(const ExperimentConfig& config, const SnapshotSet& snaps) {
    const int cols = config.train_columns();
    if (cols > snaps.time_count())
        throw ConfigError("training window exceeds the recorded snapshot horizon");
    SnapshotSet window = snaps;
    window.u = snaps.u.leftCols(cols);
    if (snaps.v) window.v = snaps.v->leftCols(cols);
    if (snaps.w) window.w = snaps.w->leftCols(cols);

    const ModelKind kind = model_kind_from_string(config.model_name);
    if (kind == ModelKind::Wave) {
        const DiffOperator d = central_diff_1d(config.grid_1d());
        return wave_extended(window, config.dt, d);
    }
    if (kind == ModelKind::Kdv) {
        const DiffOperator d = central_diff_1d(config.grid_1d());
        return kdv_extended(window, config.dt, d, config.constants.at("eta"),
                            config.constants.at("gamma"));
    }
    auto [dx, dy] = central_diff_2d(config.grid_2d());
    return zk_extended(window, dx);
}

TrainingData build_training_data(const ExperimentConfig& config, const SnapshotSet& snaps,
                                 const PodBasis& basis) {
    const int cols = config.train_columns();
    const Matrix u_train = snaps.u.leftCols(cols);
    TrainingData data;
    data.dt = config.dt;
    data.u_red = basis.v.transpose() * u_train;
    const ModelKind kind = model_kind_from_string(config.model_name);
    if (kind == ModelKind::Wave) {
        data.kind = LossKind::Wave;
        return data;
    }
    const Matrix products =
        u_train.leftCols(cols - 1).cwiseProduct(u_train.rightCols(cols - 1));
    data.q = basis.v.transpose() * products;
    if (kind == ModelKind::Kdv) {
        data.kind = LossKind::Kdv;
        data.eta = config.constants.at("eta");
        data.gamma = config.constants.at("gamma");
    } else {
        data.kind = LossKind::Zk;
    }
    return data;
}

}  // namespace

void stage_simulate_fom(const ExperimentConfig& config) {
    fs::create_directories(config.output_dir);
    const Paths paths(config.output_dir);
    const MsModel m = config.model();
    SnapshotSet snaps;
    if (config.grid_dims == 2) {
        const PeriodicGrid2D grid = config.grid_2d();
        const InitialState ic = preset_initial_condition(config.ic_preset, config.ic_params, grid);
        snaps = simulate_fom(m, grid, ic.u0, config.dt, config.t_eval);
    } else {
        const PeriodicGrid1D grid = config.grid_1d();
        const InitialState ic = preset_initial_condition(config.ic_preset, config.ic_params, grid);
        snaps = simulate_fom(m, grid, ic.u0, ic.v0, config.dt, config.t_eval);
    }
    snaps.config_fingerprint = config.fingerprint();
    snaps.save(paths.snapshots);
}

void stage_build_basis(const ExperimentConfig& config, const StageInputs& inputs) {
    fs::create_directories(config.output_dir);
    const Paths paths(config.output_dir);
    const SnapshotSet snaps =
        SnapshotSet::load(resolve_input(inputs, "snapshots", paths.snapshots));
    const ExtendedSnapshots ext = build_extended(config, snaps);
    ext.save(paths.extended);
    const PodBasis basis =
        compute_pod(ext.z, config.reduced_dim, static_cast<int>(ext.fields.size()));
    basis.save(paths.basis);
}

void stage_train(const ExperimentConfig& config, const StageInputs& inputs) {
    const Paths paths(config.output_dir);
    const fs::path basis_path = resolve_input(inputs, "basis", paths.basis);
    const SnapshotSet snaps =
        SnapshotSet::load(resolve_input(inputs, "snapshots", paths.snapshots));
    const PodBasis basis = PodBasis::load(basis_path);
    const TrainingData data = build_training_data(config, snaps, basis);

    LearnedRom learned = train(data, config.train);
    learned.model = config.model_name;
    learned.constants = config.constants;
    learned.basis_fingerprint = fingerprint_file(basis_path);
    learned.save(paths.learned);

    ordered_json side;
    side["config"] = config.to_json();
    side["best_loss"] = learned.best_loss;
    side["epochs"] = learned.loss_history.size();
    side["loss_history"] = learned.loss_history;
    side["lr_trace"] = learned.lr_trace;
    std::ofstream os(paths.learned_json);
    os << side.dump(2) << "\n";
    if (!os) throw ConfigError("cannot write " + paths.learned_json.string());
}

namespace {

RomTrajectory run_reduced(const ExperimentConfig& config, const SnapshotSet& snaps,
                          const PodBasis& basis, const LearnedRom& learned,
                          const std::string& provenance) {
    const Vector u0 = basis.v.transpose() * snaps.u.col(0);
    std::optional<Vector> v0;
    if (learned.model == "wave") {
        if (!snaps.v) throw ConfigError("wave snapshots are missing the recorded time derivative");
        v0 = Vector(basis.v.transpose() * snaps.v->col(0));
    }
    RomTrajectory rom = simulate_rom(learned, basis.v, u0, v0, config.dt, config.t_eval);
    rom.provenance = provenance;
    return rom;
}

LearnedRom intrusive_reduced_operators(const ExperimentConfig& config, const PodBasis& basis) {
    LearnedRom op;
    op.model = config.model_name;
    op.constants = config.constants;
    op.best_loss = 0.0;
    if (config.grid_dims == 2) {
        auto [dx, dy] = central_diff_2d(config.grid_2d());
        op.d_x = intrusive_operator(basis.v, dx);
        op.d_y = intrusive_operator(basis.v, dy);
    } else {
        op.d_x = intrusive_operator(basis.v, central_diff_1d(config.grid_1d()));
    }
    return op;
}

}  // namespace

void stage_simulate_rom(const ExperimentConfig& config, const StageInputs& inputs) {
    const Paths paths(config.output_dir);
    const SnapshotSet snaps =
        SnapshotSet::load(resolve_input(inputs, "snapshots", paths.snapshots));
    const PodBasis basis = PodBasis::load(resolve_input(inputs, "basis", paths.basis));
    const fs::path learned_path = resolve_input(inputs, "learned", paths.learned);
    const LearnedRom learned = LearnedRom::load(learned_path);
    RomTrajectory rom =
        run_reduced(config, snaps, basis, learned, "learned:" + fingerprint_file(learned_path));
    rom.save(paths.rom);
}

void stage_diagnose(const ExperimentConfig& config, const StageInputs& inputs) {
    const Paths paths(config.output_dir);
    const SnapshotSet snaps =
        SnapshotSet::load(resolve_input(inputs, "snapshots", paths.snapshots));
    const PodBasis basis = PodBasis::load(resolve_input(inputs, "basis", paths.basis));
    const LearnedRom learned =
        LearnedRom::load(resolve_input(inputs, "learned", paths.learned));
    const RomTrajectory rom = RomTrajectory::load(resolve_input(inputs, "rom", paths.rom));

    const LearnedRom intrusive = intrusive_reduced_operators(config, basis);
    RomTrajectory rom_int = run_reduced(config, snaps, basis, intrusive, "intrusive");
    rom_int.save(paths.rom_intrusive);

    const ModelKind kind = model_kind_from_string(config.model_name);
    std::vector<double> e_fom, e_rom, e_int;
    if (kind == ModelKind::Wave) {
        const DiffOperator d = central_diff_1d(config.grid_1d());
        const double dx = config.grid_1d().spacing();
        e_fom = wave_energy_fom(snaps.u, snaps.v ? *snaps.v : Matrix(), config.dt, dx, d);
        e_rom = wave_energy_rom(rom.u, config.dt, dx, learned.d_x, basis.v);
        e_int = wave_energy_rom(rom_int.u, config.dt, dx, intrusive.d_x, basis.v);
    } else if (kind == ModelKind::Kdv) {
        const DiffOperator d = central_diff_1d(config.grid_1d());
        const double dx = config.grid_1d().spacing();
        const double eta = config.constants.at("eta"), gamma = config.constants.at("gamma");
        e_fom = kdv_energy_fom(snaps.u, dx, d, eta, gamma);
        e_rom = kdv_energy_rom(rom.u, dx, learned.d_x, basis.v, eta, gamma);
        e_int = kdv_energy_rom(rom_int.u, dx, intrusive.d_x, basis.v, eta, gamma);
    } else {
        auto [dxo, dyo] = central_diff_2d(config.grid_2d());
        const double h = config.grid_1d().spacing();
        e_fom = zk_energy_fom(snaps.u, h, h, dxo, dyo);
        e_rom = zk_energy_rom(rom.u, h, h, learned.d_x, *learned.d_y, basis.v);
        e_int = zk_energy_rom(rom_int.u, h, h, intrusive.d_x, *intrusive.d_y, basis.v);
    }

    const EnergyReport report = make_energy_report(config.dt, e_fom, e_rom);
    const EnergyReport report_int = make_energy_report(config.dt, e_fom, e_int);
    write_series_csv(config.output_dir / "energy_fom.csv", report.time, report.fom);
    write_series_csv(config.output_dir / "energy_rom.csv", report.time, report.rom);
    write_series_csv(config.output_dir / "energy_rom_intrusive.csv", report_int.time,
                     report_int.rom);
    write_series_csv(config.output_dir / "relative_energy_error.csv", report.time,
                     report.relative_error.values);
    write_series_csv(config.output_dir / "relative_energy_error_intrusive.csv", report_int.time,
                     report_int.relative_error.values);

    // reduced-coefficient absolute errors, long format i,t,value
    const Matrix reduced_truth = basis.v.transpose() * snaps.u;
    const Matrix reduced_err = (reduced_truth - rom.u).cwiseAbs();
    {
        std::FILE* f = std::fopen((config.output_dir / "reduced_error.csv").string().c_str(), "w");
        if (!f) throw ConfigError("cannot write reduced_error.csv");
        std::fprintf(f, "i,t,value\n");
        for (Index n = 0; n < reduced_err.cols(); ++n)
            for (Index i = 0; i < reduced_err.rows(); ++i)
                std::fprintf(f, "%lld,%.17g,%.17g\n", static_cast<long long>(i),
                             config.dt * static_cast<double>(n), reduced_err(i, n));
        std::fclose(f);
    }

    const Matrix err_field = state_error_field(snaps.u, rom.u, basis.v);
    if (config.grid_dims == 2) {
        // full-horizon 2D fields are large; record the final-time slice
        const PeriodicGrid2D g2 = config.grid_2d();
        write_field_csv_2d(config.output_dir / "state_error.csv", g2.x.nodes(), g2.y.nodes(),
                           config.dt * static_cast<double>(err_field.cols() - 1),
                           err_field.col(err_field.cols() - 1));
    } else {
        std::vector<double> time(err_field.cols());
        for (std::size_t i = 0; i < time.size(); ++i) time[i] = config.dt * static_cast<double>(i);
        write_field_csv_1d(config.output_dir / "state_error.csv", config.grid_1d().nodes(), time,
                           err_field);
    }
}

namespace {

struct ArtifactSpec {
    std::string name;
    std::string file;
};

const std::vector<ArtifactSpec>& artifact_list() {
    static const std::vector<ArtifactSpec> kArtifacts = {
        {"snapshots", "snapshots.msnap"},
        {"extended", "extended.msnap"},
        {"basis", "basis.msnap"},
        {"learned", "learned.msnap"},
        {"learned_record", "learned.json"},
        {"rom", "rom.msnap"},
        {"rom_intrusive", "rom_intrusive.msnap"},
        {"energy_fom", "energy_fom.csv"},
        {"energy_rom", "energy_rom.csv"},
        {"energy_rom_intrusive", "energy_rom_intrusive.csv"},
        {"relative_energy_error", "relative_energy_error.csv"},
        {"relative_energy_error_intrusive", "relative_energy_error_intrusive.csv"},
        {"reduced_error", "reduced_error.csv"},
        {"state_error", "state_error.csv"},
    };
    return kArtifacts;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// cheap structural checks of the produced files before the manifest is final
void validate_artifact(const fs::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".csv") {
        std::ifstream is(path);
        if (!is) throw ConfigError("artifact validation: cannot open " + path.string());
        std::string header;
        std::getline(is, header);
        const std::size_t cols = std::count(header.begin(), header.end(), ',') + 1;
        if (header.empty()) throw ConfigError("artifact validation: empty csv " + path.string());
        std::string line;
        std::size_t rows = 0;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            if (static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 != cols)
                throw ConfigError("artifact validation: ragged csv " + path.string());
            ++rows;
        }
        if (rows == 0) throw ConfigError("artifact validation: csv without rows " + path.string());
    } else if (ext == ".json") {
        std::ifstream is(path);
        if (!is) throw ConfigError("artifact validation: cannot open " + path.string());
        json j;
        try {
            is >> j;
        } catch (const json::exception& e) {
            throw ConfigError("artifact validation: bad json " + path.string() + ": " + e.what());
        }
    } else if (ext == ".msnap") {
        Container::load(path);  // throws if malformed
    }
}

void write_manifest_atomic(const fs::path& dir, const ordered_json& manifest) {
    const fs::path tmp = dir / "manifest.json.tmp";
    {
        std::ofstream os(tmp);
        os << manifest.dump(2) << "\n";
        if (!os) throw ConfigError("cannot write manifest");
    }
    fs::rename(tmp, dir / "manifest.json");
}

}  // namespace

ordered_json run_pipeline(const ExperimentConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);
    const std::string fp = config.fingerprint();
    const fs::path manifest_path = config.output_dir / "manifest.json";

    // content-addressed reuse of a completed run
    if (fs::exists(manifest_path)) {
        try {
            std::ifstream is(manifest_path);
            json old;
            is >> old;
            if (old.value("complete", false) && old.value("config_fingerprint", "") == fp) {
                bool intact = true;
                for (const auto& a : old.at("artifacts")) {
                    const fs::path p = config.output_dir / a.at("path").get<std::string>();
                    if (!fs::exists(p) || fingerprint_file(p) != a.at("fingerprint")) {
                        intact = false;
                        break;
                    }
                }
                if (intact) {
                    ordered_json fresh = old.get<ordered_json>();
                    fresh["generated_at"] = utc_timestamp();
                    fresh["reused"] = true;
                    write_manifest_atomic(config.output_dir, fresh);
                    return fresh;
                }
            }
        } catch (const std::exception&) {
            // unreadable manifest: fall through and recompute
        }
    }

    ordered_json timings;
    std::string failed_stage;
    const auto run_stage = [&](const char* name, auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        try {
            fn();
        } catch (...) {
            failed_stage = name;
            throw;
        }
        const std::chrono::duration<double> sec = std::chrono::steady_clock::now() - start;
        timings[std::string(name) + "_s"] = sec.count();
    };

    try {
        run_stage("simulate_fom", [&] { stage_simulate_fom(config); });
        run_stage("build_basis", [&] { stage_build_basis(config); });
        run_stage("train", [&] { stage_train(config); });
        run_stage("simulate_rom", [&] { stage_simulate_rom(config); });
        run_stage("diagnose", [&] { stage_diagnose(config); });
    } catch (const std::exception& e) {
        ordered_json manifest;
        manifest["schema"] = "msopinf-manifest-v1";
        manifest["complete"] = false;
        manifest["failed_stage"] = failed_stage;
        manifest["error"] = e.what();
        manifest["config_fingerprint"] = fp;
        manifest["config"] = config.to_json();
        manifest["generated_at"] = utc_timestamp();
        write_manifest_atomic(config.output_dir, manifest);
        throw;
    }

    ordered_json manifest;
    manifest["schema"] = "msopinf-manifest-v1";
    manifest["complete"] = true;
    manifest["config_fingerprint"] = fp;
    manifest["config"] = config.to_json();
    manifest["versions"] = {{"msopinf", kVersion}, {"container", "MSNAP1"}};
    ordered_json artifacts = ordered_json::array();
    for (const auto& spec : artifact_list()) {
        const fs::path p = config.output_dir / spec.file;
        if (!fs::exists(p)) throw ConfigError("pipeline: expected artifact missing: " + spec.file);
        validate_artifact(p);
        artifacts.push_back(
            {{"name", spec.name}, {"path", spec.file}, {"fingerprint", fingerprint_file(p)}});
    }
    manifest["artifacts"] = artifacts;
    manifest["timings"] = timings;
    manifest["generated_at"] = utc_timestamp();
    write_manifest_atomic(config.output_dir, manifest);
    return manifest;
}

}  // namespace msopinf

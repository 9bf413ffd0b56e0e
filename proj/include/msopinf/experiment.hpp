#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "msopinf/grid.hpp"
#include "msopinf/models.hpp"
#include "msopinf/opinf.hpp"
#include "msopinf/types.hpp"

namespace msopinf {

inline constexpr const char* kVersion = "0.1.0";

struct InitialState {
    Vector u0;
    std::optional<Vector> v0;  // initial time derivative (wave)
};

/// Closed-form initial conditions sampled on the grid. Presets:
///   wave-sech          u0 = amplitude * sech(x - center), v0 = 0
///   kdv-sech           u0 = amplitude * sech(x - center), center defaults to
///                      the domain midpoint
///   zk-double-soliton  two line solitons, parameters eps, theta, c1, c2,
///                      x1, x2, y1, y2
InitialState preset_initial_condition(const std::string& name,
                                      const std::map<std::string, double>& params,
                                      const PeriodicGrid1D& grid);
InitialState preset_initial_condition(const std::string& name,
                                      const std::map<std::string, double>& params,
                                      const PeriodicGrid2D& grid);

struct ExperimentConfig {
    std::string model_name;
    std::map<std::string, double> constants;
    double grid_a = 0.0;
    double grid_b = 1.0;
    int grid_n = 0;
    int grid_dims = 1;
    std::string ic_preset;
    std::map<std::string, double> ic_params;
    double dt = 0.0;
    double t_train = 0.0;
    double t_eval = 0.0;
    int reduced_dim = 0;
    TrainConfig train;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::ordered_json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    /// Content hash of the canonical serialized config (output_dir excluded,
    /// so relocated runs stay comparable).
    std::string fingerprint() const;

    MsModel model() const;
    PeriodicGrid1D grid_1d() const;
    PeriodicGrid2D grid_2d() const;
    int train_columns() const;  // time levels in the training window
};

/// Reads a JSON config file; the MSOPINF_OUT environment variable overrides
/// the configured output directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Per-stage input overrides, keyed snapshots / extended / basis / learned / rom.
using StageInputs = std::map<std::string, std::filesystem::path>;

void stage_simulate_fom(const ExperimentConfig& config);
void stage_build_basis(const ExperimentConfig& config, const StageInputs& inputs = {});
void stage_train(const ExperimentConfig& config, const StageInputs& inputs = {});
void stage_simulate_rom(const ExperimentConfig& config, const StageInputs& inputs = {});
void stage_diagnose(const ExperimentConfig& config, const StageInputs& inputs = {});

/// Runs all stages and writes the manifest (atomically, last). A completed
/// run with matching config fingerprint and artifact hashes is not recomputed.
/// Returns the manifest.
nlohmann::ordered_json run_pipeline(const ExperimentConfig& config);

}  // namespace msopinf

// Command-line front end for the reduced-order modeling pipeline:
// full-order simulation, basis construction, operator learning, reduced
// simulation and diagnostics, each driven by a JSON config.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msopinf/experiment.hpp"

namespace {

msopinf::StageInputs parse_stage_inputs(const std::vector<std::string>& raw) {
    msopinf::StageInputs inputs;
    for (const std::string& item : raw) {
        const auto pos = item.find('=');
        if (pos == std::string::npos || pos == 0 || pos + 1 == item.size())
            throw msopinf::ConfigError(
                "--stage-input expects key=path (keys: snapshots, extended, basis, learned, rom)");
        inputs[item.substr(0, pos)] = item.substr(pos + 1);
    }
    return inputs;
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> stage_inputs;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--stage-input", opts.stage_inputs,
                    "override a stage input as key=path (repeatable)");
    cmd->add_option("--seed", opts.seed, "override the config seed");
}

msopinf::ExperimentConfig resolve_config(const CommonOpts& opts) {
    msopinf::ExperimentConfig config = msopinf::load_config(opts.config_path);
    if (opts.seed) {
        config.seed = *opts.seed;
        config.train.seed = *opts.seed;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-preserving reduced-order models of multi-symplectic PDEs"};
    app.require_subcommand(1);

    CommonOpts opts;
    CLI::App* c_fom = app.add_subcommand("simulate-fom", "run the full-order solver");
    CLI::App* c_basis = app.add_subcommand("build-basis", "assemble extended snapshots and the basis");
    CLI::App* c_train = app.add_subcommand("train", "learn the skew reduced operators");
    CLI::App* c_rom = app.add_subcommand("simulate-rom", "run the learned reduced model");
    CLI::App* c_diag = app.add_subcommand("diagnose", "energy, error and conservation reports");
    CLI::App* c_pipe = app.add_subcommand("pipeline", "all stages plus the manifest");
    for (CLI::App* cmd : {c_fom, c_basis, c_train, c_rom, c_diag, c_pipe}) add_common(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const msopinf::ExperimentConfig config = resolve_config(opts);
        const msopinf::StageInputs inputs = parse_stage_inputs(opts.stage_inputs);
        if (c_fom->parsed()) {
            msopinf::stage_simulate_fom(config);
        } else if (c_basis->parsed()) {
            msopinf::stage_build_basis(config, inputs);
        } else if (c_train->parsed()) {
            msopinf::stage_train(config, inputs);
        } else if (c_rom->parsed()) {
            msopinf::stage_simulate_rom(config, inputs);
        } else if (c_diag->parsed()) {
            msopinf::stage_diagnose(config, inputs);
        } else if (c_pipe->parsed()) {
            msopinf::run_pipeline(config);
        }
    } catch (const msopinf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const msopinf::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

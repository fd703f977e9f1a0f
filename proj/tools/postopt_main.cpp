#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "postopt/config.hpp"
#include "postopt/errors.hpp"
#include "postopt/pipeline.hpp"

namespace {

// Exit codes: 0 success, 2 configuration, 3 missing input, 4 violated
// assumption, 5 solver failure.
constexpr int kExitConfig = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitAssumption = 4;
constexpr int kExitSolver = 5;

int fail(const char* kind, const std::string& msg, int code) {
    std::cerr << "error kind=" << kind << " msg=\"" << msg << "\"\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-fidelity optimal control with discrepancy-calibrated solution updating"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    postopt::CliOverrides overrides;
    app.add_option("--config", config_path, "Path to a key = value configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--out", overrides.out_dir, "Output directory (overrides output.dir)");
    app.add_option("--seed", overrides.seed, "Sampler seed (overrides sampler.seed)");
    app.add_option("--stages", overrides.stages,
                   "Comma-separated stage list (overrides run.stages)");

    auto* run_cmd = app.add_subcommand("run", "Execute the configured pipeline stages");
    auto* manufacture_cmd = app.add_subcommand(
        "manufacture-data", "Solve the low-fidelity problem and manufacture Z/Y data files");
    auto* oracle_cmd = app.add_subcommand(
        "oracle-check", "Compare the factored posterior path against dense tiny-scale oracles");
    auto* report_cmd = app.add_subcommand("report", "Write report.json from existing artifacts");
    for (auto* sub : {run_cmd, manufacture_cmd, oracle_cmd, report_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fail("config", "command line parse error", kExitConfig);
    }

    try {
        std::optional<std::filesystem::path> cfg_file;
        if (config_path) {
            cfg_file = *config_path;
        }
        postopt::RunConfig cfg = postopt::load_config(cfg_file, overrides);
        if (manufacture_cmd->parsed()) {
            cfg.run_stages = {postopt::Stage::Optimize, postopt::Stage::ManufactureData};
        } else if (oracle_cmd->parsed()) {
            cfg.run_stages = {postopt::Stage::OracleCheck};
        } else if (report_cmd->parsed()) {
            cfg.run_stages = {postopt::Stage::Report};
        } else if (run_cmd->parsed() && overrides.stages) {
            // already applied by load_config
        }
        postopt::run_pipeline(cfg);
        return 0;
    } catch (const postopt::ConfigError& e) {
        return fail("config", e.what(), kExitConfig);
    } catch (const std::invalid_argument& e) {
        return fail("config", e.what(), kExitConfig);
    } catch (const postopt::MissingInputError& e) {
        return fail("missing-input", e.what(), kExitMissingInput);
    } catch (const postopt::AssumptionError& e) {
        return fail("assumption", e.what(), kExitAssumption);
    } catch (const postopt::SolverError& e) {
        return fail("solver", e.what(), kExitSolver);
    } catch (const std::exception& e) {
        return fail("solver", e.what(), kExitSolver);
    }
}

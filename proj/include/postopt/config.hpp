#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace postopt {

/// Pipeline stage vocabulary (fixed); run executes requested stages in this
/// canonical order.
enum class Stage {
    Optimize,
    ManufactureData,
    SamplePrior,
    Calibrate,
    Update,
    Report,
    OracleCheck,
};

std::string stage_name(Stage s);
Stage parse_stage(const std::string& name);

/// Full run configuration. Defaults reproduce the 1D benchmark: kappa = 1,
/// v = 0.5, h_robin = 2, beta = 10, 200 nodes, gamma = 1, epsilon = 1e-2,
/// zeta = 2, alpha = 1e-2, N = 2 data pairs.
struct RunConfig {
    int mesh_n_nodes = 200;

    double model_kappa = 1.0;
    double model_v = 0.5;
    double model_h_robin = 2.0;

    double objective_beta = 10.0;
    // target as polynomial coefficients c0 + c1 x + c2 x^2 + ...
    std::vector<double> objective_target = {42.5, 30.0, -30.0};

    double prior_gamma = 1.0;
    double prior_epsilon = 1e-2;
    double prior_zeta = 2.0;
    double prior_alpha = 1e-2;

    std::string data_mode = "manufacture";  // or "files"
    int data_n_pairs = 2;
    double data_perturbation_scale = 1.0;
    std::string data_z_path;
    std::string data_y_path;

    int sampler_samples = 100;
    int sampler_steps = 11;
    double sampler_z_r_scale = 1.5;
    std::uint64_t sampler_seed = 0;

    std::string output_dir = "out";
    std::vector<Stage> run_stages = {Stage::Optimize, Stage::ManufactureData, Stage::Calibrate,
                                     Stage::Update, Stage::Report};

    /// Evaluate the target polynomial at x.
    double target_at(double x) const;

    /// Throws ConfigError on out-of-range parameters or unknown stages.
    void validate() const;
};

/// Overrides collected from the command line (highest precedence).
struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> stages;
};

/// Assemble the effective configuration with precedence
/// CLI flag > environment (SECTION_KEY) > config file > built-in default.
RunConfig load_config(const std::optional<std::filesystem::path>& config_path,
                      const CliOverrides& overrides);

}  // namespace postopt

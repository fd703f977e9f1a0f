#include "postopt/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "postopt/errors.hpp"

namespace postopt {

namespace {

const std::array<std::pair<Stage, const char*>, 7> kStageNames = {{
    {Stage::Optimize, "optimize"},
    {Stage::ManufactureData, "manufacture-data"},
    {Stage::SamplePrior, "sample-prior"},
    {Stage::Calibrate, "calibrate"},
    {Stage::Update, "update"},
    {Stage::Report, "report"},
    {Stage::OracleCheck, "oracle-check"},
}};

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t");
    auto end = s.find_last_not_of(" \t");
    if (begin == std::string::npos) {
        return "";
    }
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
        throw ConfigError("config: value of '" + key + "' is not a number: '" + value + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigError("config: value of '" + key + "' is not an integer: '" + value + "'");
    }
    return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: value of '" + key + "' is not an unsigned integer: '" + value +
                          "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split(value, ',')) {
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw ConfigError("config: '" + key + "' needs at least one value");
    }
    return out;
}

std::vector<Stage> parse_stage_list(const std::string& value) {
    std::vector<Stage> stages;
    for (const auto& item : split(value, ',')) {
        if (!item.empty()) {
            stages.push_back(parse_stage(item));
        }
    }
    if (stages.empty()) {
        throw ConfigError("config: stage list is empty");
    }
    return stages;
}

std::string env_name(const std::string& key) {
    std::string name = key;
    for (char& c : name) {
        if (c == '.') {
            c = '_';
        } else {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    return name;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"mesh.n_nodes", [](RunConfig& c, const std::string& k, const std::string& v) { c.mesh_n_nodes = parse_int(k, v); }},
        {"model.kappa", [](RunConfig& c, const std::string& k, const std::string& v) { c.model_kappa = parse_double(k, v); }},
        {"model.v", [](RunConfig& c, const std::string& k, const std::string& v) { c.model_v = parse_double(k, v); }},
        {"model.h_robin", [](RunConfig& c, const std::string& k, const std::string& v) { c.model_h_robin = parse_double(k, v); }},
        {"objective.beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.objective_beta = parse_double(k, v); }},
        {"objective.target", [](RunConfig& c, const std::string& k, const std::string& v) { c.objective_target = parse_double_list(k, v); }},
        {"prior.gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.prior_gamma = parse_double(k, v); }},
        {"prior.epsilon", [](RunConfig& c, const std::string& k, const std::string& v) { c.prior_epsilon = parse_double(k, v); }},
        {"prior.zeta", [](RunConfig& c, const std::string& k, const std::string& v) { c.prior_zeta = parse_double(k, v); }},
        {"prior.alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.prior_alpha = parse_double(k, v); }},
        {"data.mode", [](RunConfig& c, const std::string&, const std::string& v) { c.data_mode = v; }},
        {"data.n_pairs", [](RunConfig& c, const std::string& k, const std::string& v) { c.data_n_pairs = parse_int(k, v); }},
        {"data.perturbation_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.data_perturbation_scale = parse_double(k, v); }},
        {"data.z_path", [](RunConfig& c, const std::string&, const std::string& v) { c.data_z_path = v; }},
        {"data.y_path", [](RunConfig& c, const std::string&, const std::string& v) { c.data_y_path = v; }},
        {"sampler.samples", [](RunConfig& c, const std::string& k, const std::string& v) { c.sampler_samples = parse_int(k, v); }},
        {"sampler.steps", [](RunConfig& c, const std::string& k, const std::string& v) { c.sampler_steps = parse_int(k, v); }},
        {"sampler.z_r_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.sampler_z_r_scale = parse_double(k, v); }},
        {"sampler.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.sampler_seed = parse_u64(k, v); }},
        {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
        {"run.stages", [](RunConfig& c, const std::string&, const std::string& v) { c.run_stages = parse_stage_list(v); }},
    };
    return table;
}

}  // namespace

std::string stage_name(Stage s) {
    for (const auto& [stage, name] : kStageNames) {
        if (stage == s) {
            return name;
        }
    }
    return "?";
}

Stage parse_stage(const std::string& name) {
    for (const auto& [stage, sname] : kStageNames) {
        if (name == sname) {
            return stage;
        }
    }
    throw ConfigError("config: unknown stage '" + name + "'");
}

double RunConfig::target_at(double x) const {
    double value = 0.0;
    double power = 1.0;
    for (double c : objective_target) {
        value += c * power;
        power *= x;
    }
    return value;
}

void RunConfig::validate() const {
    if (mesh_n_nodes < 2) {
        throw ConfigError("config: mesh.n_nodes must be >= 2");
    }
    if (model_kappa <= 0.0) {
        throw ConfigError("config: model.kappa must be positive");
    }
    if (model_h_robin < 0.0) {
        throw ConfigError("config: model.h_robin must be nonnegative");
    }
    if (objective_beta <= 0.0) {
        throw ConfigError("config: objective.beta must be positive");
    }
    if (prior_gamma <= 0.0 || prior_epsilon <= 0.0 || prior_zeta <= 0.0 || prior_alpha <= 0.0) {
        throw ConfigError("config: prior.gamma/epsilon/zeta/alpha must all be positive");
    }
    if (data_mode != "manufacture" && data_mode != "files") {
        throw ConfigError("config: data.mode must be 'manufacture' or 'files'");
    }
    if (data_n_pairs < 0 || data_n_pairs > mesh_n_nodes) {
        throw ConfigError("config: data.n_pairs must be in [0, mesh.n_nodes]");
    }
    if (data_mode == "files" && (data_z_path.empty() || data_y_path.empty())) {
        throw ConfigError("config: data.mode=files requires data.z_path and data.y_path");
    }
    if (sampler_samples < 1 || sampler_steps < 1) {
        throw ConfigError("config: sampler.samples and sampler.steps must be >= 1");
    }
    if (run_stages.empty()) {
        throw ConfigError("config: run.stages is empty");
    }
}

RunConfig load_config(const std::optional<std::filesystem::path>& config_path,
                      const CliOverrides& overrides) {
    RunConfig cfg;

    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) {
            throw MissingInputError("config: cannot open '" + config_path->string() + "'");
        }
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            const auto it = setters().find(key);
            if (it == setters().end()) {
                throw ConfigError("config: unknown key '" + key + "' on line " +
                                  std::to_string(lineno));
            }
            it->second(cfg, key, value);
        }
    }

    for (const auto& [key, setter] : setters()) {
        if (const char* value = std::getenv(env_name(key).c_str())) {
            setter(cfg, key, value);
        }
    }

    if (overrides.out_dir) {
        cfg.output_dir = *overrides.out_dir;
    }
    if (overrides.seed) {
        cfg.sampler_seed = *overrides.seed;
    }
    if (overrides.stages) {
        cfg.run_stages = parse_stage_list(*overrides.stages);
    }

    cfg.validate();
    return cfg;
}

}  // namespace postopt

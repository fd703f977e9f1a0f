#include "postopt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "postopt/csv.hpp"
#include "postopt/errors.hpp"
#include "postopt/fe.hpp"
#include "postopt/forward_model.hpp"
#include "postopt/oracle.hpp"
#include "postopt/rng.hpp"
#include "postopt/sampling.hpp"
#include "postopt/update.hpp"

namespace postopt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingInputError("manifest: cannot hash missing file '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(ss.str())));
    return buf;
}

std::string config_canonical_string(const RunConfig& cfg) {
    std::ostringstream out;
    out << "mesh.n_nodes=" << cfg.mesh_n_nodes << ";model.kappa=" << csv::format_double(cfg.model_kappa)
        << ";model.v=" << csv::format_double(cfg.model_v)
        << ";model.h_robin=" << csv::format_double(cfg.model_h_robin)
        << ";objective.beta=" << csv::format_double(cfg.objective_beta) << ";objective.target=";
    for (double c : cfg.objective_target) {
        out << csv::format_double(c) << ',';
    }
    out << ";prior.gamma=" << csv::format_double(cfg.prior_gamma)
        << ";prior.epsilon=" << csv::format_double(cfg.prior_epsilon)
        << ";prior.zeta=" << csv::format_double(cfg.prior_zeta)
        << ";prior.alpha=" << csv::format_double(cfg.prior_alpha) << ";data.mode=" << cfg.data_mode
        << ";data.n_pairs=" << cfg.data_n_pairs
        << ";data.perturbation_scale=" << csv::format_double(cfg.data_perturbation_scale)
        << ";data.z_path=" << cfg.data_z_path << ";data.y_path=" << cfg.data_y_path
        << ";sampler.samples=" << cfg.sampler_samples << ";sampler.steps=" << cfg.sampler_steps
        << ";sampler.z_r_scale=" << csv::format_double(cfg.sampler_z_r_scale)
        << ";sampler.seed=" << cfg.sampler_seed;
    return out.str();
}

/// Shifted Legendre polynomial P_k(2x - 1) sampled at the mesh nodes.
Vector legendre_probe(const Vector& nodes, int degree) {
    const int n = static_cast<int>(nodes.size());
    Vector prev = Vector::Ones(n);
    Vector t = 2.0 * nodes.array() - 1.0;
    if (degree == 0) {
        return prev;
    }
    Vector cur = t;
    for (int k = 1; k < degree; ++k) {
        Vector next = ((2.0 * k + 1.0) * t.cwiseProduct(cur) - static_cast<double>(k) * prev) /
                      static_cast<double>(k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

double weighted_norm(const Vector& v, const Matrix& W) { return std::sqrt(v.dot(W * v)); }

struct BenchmarkPieces {
    Mesh1D mesh;
    Vector nodes;
    Matrix mass;  // doubles as M_u and M_z
    LinearForwardModel lf;
    LinearForwardModel hf;
    ObjectiveSpec spec;
};

BenchmarkPieces build_pieces(const RunConfig& cfg) {
    const Mesh1D mesh = Mesh1D::unit_interval(cfg.mesh_n_nodes);
    SymMatrix M = fe::assemble_mass(mesh);
    LinearForwardModel lf =
        LinearForwardModel::diffusion(mesh, cfg.model_kappa, cfg.model_h_robin);
    LinearForwardModel hf = LinearForwardModel::advection_diffusion(mesh, cfg.model_kappa,
                                                                    cfg.model_v, cfg.model_h_robin);
    Vector nodes = mesh.nodes();
    Vector target(cfg.mesh_n_nodes);
    for (int i = 0; i < cfg.mesh_n_nodes; ++i) {
        target[i] = cfg.target_at(nodes[i]);
    }
    ObjectiveSpec spec{std::move(target), cfg.objective_beta, M.entries, M.entries};
    return BenchmarkPieces{mesh, std::move(nodes), std::move(M.entries), std::move(lf),
                           std::move(hf), std::move(spec)};
}

Vector read_vector_artifact(const fs::path& path, int expected_rows) {
    const csv::Table table = csv::read(path);
    if (table.values.cols() != 2) {
        throw ConfigError("artifact '" + path.string() + "' must have exactly two columns");
    }
    if (table.values.rows() != expected_rows) {
        throw ConfigError("artifact '" + path.string() + "' has " +
                          std::to_string(table.values.rows()) + " rows, expected " +
                          std::to_string(expected_rows));
    }
    return table.values.col(1);
}

void write_vector_artifact(const fs::path& path, const std::string& name, const Vector& nodes,
                           const Vector& values) {
    Matrix m(nodes.size(), 2);
    m.col(0) = nodes;
    m.col(1) = values;
    csv::write(path, {"x", name}, m);
}

void write_matrix_artifact(const fs::path& path, const std::string& prefix, const Vector& nodes,
                           const Matrix& columns) {
    std::vector<std::string> header = {"x"};
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        header.push_back(prefix + "_" + std::to_string(j + 1));
    }
    Matrix m(nodes.size(), columns.cols() + 1);
    m.col(0) = nodes;
    m.rightCols(columns.cols()) = columns;
    csv::write(path, header, m);
}

Matrix read_matrix_artifact(const fs::path& path, int expected_rows) {
    const csv::Table table = csv::read(path);
    if (table.values.cols() < 1) {
        throw ConfigError("artifact '" + path.string() + "' has no columns");
    }
    if (table.values.rows() != expected_rows) {
        throw ConfigError("artifact '" + path.string() + "' has " +
                          std::to_string(table.values.rows()) + " rows, expected " +
                          std::to_string(expected_rows));
    }
    return table.values.rightCols(table.values.cols() - 1);
}

class PipelineRun {
public:
    explicit PipelineRun(const RunConfig& cfg) : cfg_(cfg), out_(cfg.output_dir) {}

    void run() {
        fs::create_directories(out_);
        // canonical dependency order
        const Stage order[] = {Stage::Optimize,  Stage::ManufactureData, Stage::SamplePrior,
                               Stage::Calibrate, Stage::Update,          Stage::Report,
                               Stage::OracleCheck};
        for (Stage s : order) {
            for (Stage requested : cfg_.run_stages) {
                if (requested == s) {
                    execute(s);
                }
            }
        }
    }

private:
    void execute(Stage s) {
        const auto start = std::chrono::steady_clock::now();
        inputs_.clear();
        outputs_.clear();
        note_.clear();
        switch (s) {
            case Stage::Optimize: stage_optimize(); break;
            case Stage::ManufactureData: stage_manufacture(); break;
            case Stage::SamplePrior: stage_sample_prior(); break;
            case Stage::Calibrate: stage_calibrate(); break;
            case Stage::Update: stage_update(); break;
            case Stage::Report: stage_report(); break;
            case Stage::OracleCheck: stage_oracle_check(); break;
        }
        const double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        append_manifest(s, wall_ms);
    }

    void append_manifest(Stage s, double wall_ms) {
        std::ofstream manifest(out_ / "manifest.txt", std::ios::app);
        char wall[32];
        std::snprintf(wall, sizeof(wall), "%.3f", wall_ms);
        manifest << "stage=" << stage_name(s) << " wall_ms=" << wall;
        manifest << " inputs=config:";
        char cfg_hash[17];
        std::snprintf(cfg_hash, sizeof(cfg_hash), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(config_canonical_string(cfg_))));
        manifest << cfg_hash;
        for (const auto& f : inputs_) {
            manifest << ',' << f.filename().string() << ':' << hash_file(f);
        }
        manifest << " outputs=";
        for (std::size_t i = 0; i < outputs_.size(); ++i) {
            manifest << (i ? "," : "") << outputs_[i].filename().string() << ':'
                     << hash_file(outputs_[i]);
        }
        if (!note_.empty()) {
            manifest << " note=" << note_;
        }
        manifest << '\n';
    }

    fs::path require_input(const fs::path& path) {
        if (!fs::exists(path)) {
            throw MissingInputError("stage input missing: '" + path.string() + "'");
        }
        inputs_.push_back(path);
        return path;
    }

    const BenchmarkPieces& pieces() {
        if (!pieces_) {
            pieces_.emplace(build_pieces(cfg_));
        }
        return *pieces_;
    }

    const EllipticPrior& prior() {
        if (!prior_) {
            prior_.emplace(build_elliptic_prior(pieces().mesh, cfg_.prior_gamma,
                                                cfg_.prior_epsilon));
        }
        return *prior_;
    }

    Vector load_z_tilde() {
        return read_vector_artifact(require_input(out_ / "z_tilde.csv"), cfg_.mesh_n_nodes);
    }

    std::pair<fs::path, fs::path> data_paths() const {
        if (cfg_.data_mode == "files") {
            return {fs::path(cfg_.data_z_path), fs::path(cfg_.data_y_path)};
        }
        return {out_ / "Z.csv", out_ / "Y.csv"};
    }

    void stage_optimize() {
        const auto& p = pieces();
        const LfOptimum opt = solve_lf_optimum(p.spec, p.lf);
        write_vector_artifact(out_ / "z_tilde.csv", "z", p.nodes, opt.z_tilde);
        write_vector_artifact(out_ / "u_tilde.csv", "u", p.nodes, opt.u_tilde);
        outputs_ = {out_ / "z_tilde.csv", out_ / "u_tilde.csv"};
    }

    void stage_manufacture() {
        const auto& p = pieces();
        const Vector z_tilde = load_z_tilde();
        const int N = cfg_.data_n_pairs;
        Matrix Z(cfg_.mesh_n_nodes, N);
        for (int l = 0; l < N; ++l) {
            if (l == 0) {
                Z.col(l) = z_tilde;
            } else {
                Vector probe = legendre_probe(p.nodes, l);
                probe /= weighted_norm(probe, p.mass);
                Z.col(l) = z_tilde + cfg_.data_perturbation_scale * probe;
            }
        }
        const DiscrepancyData data = generate_discrepancy_data(p.lf, p.hf, Z);
        write_matrix_artifact(out_ / "Z.csv", "z", p.nodes, data.Z);
        write_matrix_artifact(out_ / "Y.csv", "y", p.nodes, data.Y);
        outputs_ = {out_ / "Z.csv", out_ / "Y.csv"};
        std::ostringstream note;
        note << "probes=z_tilde+legendre(1.." << std::max(0, N - 1)
             << "),scale=" << csv::format_double(cfg_.data_perturbation_scale);
        note_ = note.str();
    }

    void stage_sample_prior() {
        const auto& p = pieces();
        const Vector z_tilde = load_z_tilde();
        SamplePlan plan;
        plan.sample_count = cfg_.sampler_samples;
        plan.segment_steps = cfg_.sampler_steps;
        plan.z_ref = cfg_.sampler_z_r_scale * z_tilde;
        plan.seed = cfg_.sampler_seed;
        const PriorSampleSet set = sample_prior(plan, prior(), cfg_.prior_zeta, z_tilde, p.mass);

        const int S = plan.sample_count;
        const int K = plan.segment_steps;
        std::vector<std::string> header = {"x"};
        Matrix values(cfg_.mesh_n_nodes, 1 + S * (K + 1));
        values.col(0) = p.nodes;
        int col = 1;
        for (int s = 0; s < S; ++s) {
            for (int k = 0; k <= K; ++k, ++col) {
                header.push_back("s" + std::to_string(s + 1) + "_k" + std::to_string(k));
                values.col(col) = set.curves[static_cast<std::size_t>(s)].col(k);
            }
        }
        csv::write(out_ / "prior_samples.csv", header, values);
        outputs_ = {out_ / "prior_samples.csv"};
        note_ = "z_r=" + csv::format_double(cfg_.sampler_z_r_scale) + "*z_tilde,seed=" +
                std::to_string(cfg_.sampler_seed);
    }

    void stage_calibrate() {
        const auto& p = pieces();
        const Vector z_tilde = load_z_tilde();
        const auto [z_path, y_path] = data_paths();
        require_input(z_path);
        require_input(y_path);
        const DiscrepancyData data = ingest_data(z_path, y_path, cfg_.mesh_n_nodes);
        const PriorSpec prior_spec{cfg_.prior_gamma, cfg_.prior_epsilon, cfg_.prior_zeta,
                                   cfg_.prior_alpha};
        const PosteriorMean pm = calibrate(data, prior_spec, prior(), z_tilde, p.mass);
        save_posterior_mean(out_ / "posterior_mean", pm, p.nodes);
        outputs_ = {out_ / "posterior_mean" / "scalars.json",
                    out_ / "posterior_mean" / "u_ell.csv", out_ / "posterior_mean" / "u_shift.csv",
                    out_ / "posterior_mean" / "w.csv"};
    }

    void stage_update() {
        const auto& p = pieces();
        const Vector z_tilde = load_z_tilde();
        const auto [z_path, y_path] = data_paths();
        const Matrix Z = read_matrix_artifact(require_input(z_path), cfg_.mesh_n_nodes);
        require_input(out_ / "posterior_mean" / "scalars.json");
        const PosteriorMean pm = load_posterior_mean(out_ / "posterior_mean", z_tilde, Z);

        LfOptimum opt;
        opt.z_tilde = z_tilde;
        opt.u_tilde = p.lf.solve(z_tilde);
        opt.gradient_norm = gradient(p.spec, p.lf, z_tilde).norm();
        opt.objective_value = objective(p.spec, opt.u_tilde, z_tilde);

        const UpdateResult result = update_solution(pm, opt, p.spec, p.lf);
        write_vector_artifact(out_ / "b_theta.csv", "b_theta", p.nodes, result.b_theta);
        write_vector_artifact(out_ / "z_bar.csv", "z", p.nodes, result.z_bar);
        outputs_ = {out_ / "b_theta.csv", out_ / "z_bar.csv"};
    }

    void stage_report() {
        const auto& p = pieces();
        const Vector z_tilde = load_z_tilde();
        const Vector z_bar = read_vector_artifact(require_input(out_ / "z_bar.csv"),
                                                  cfg_.mesh_n_nodes);
        const auto [z_path, y_path] = data_paths();
        const Matrix Z = read_matrix_artifact(require_input(z_path), cfg_.mesh_n_nodes);
        const Matrix Y = read_matrix_artifact(require_input(y_path), cfg_.mesh_n_nodes);
        require_input(out_ / "posterior_mean" / "scalars.json");
        const PosteriorMean pm = load_posterior_mean(out_ / "posterior_mean", z_tilde, Z);

        json report;
        report["parameters"] = {
            {"mesh.n_nodes", cfg_.mesh_n_nodes},
            {"model.kappa", cfg_.model_kappa},
            {"model.v", cfg_.model_v},
            {"model.h_robin", cfg_.model_h_robin},
            {"objective.beta", cfg_.objective_beta},
            {"prior.gamma", cfg_.prior_gamma},
            {"prior.epsilon", cfg_.prior_epsilon},
            {"prior.zeta", cfg_.prior_zeta},
            {"prior.alpha", cfg_.prior_alpha},
            {"data.n_pairs", pm.count()},
        };

        // data fit diagnostics in the M_u norm
        json fits = json::array();
        for (int l = 0; l < pm.count(); ++l) {
            const Vector misfit = eval_delta(pm, Z.col(l), p.mass) - Y.col(l);
            const double denom = weighted_norm(Y.col(l), p.mass);
            json row;
            row["pair"] = l + 1;
            row["rel_error_Mu"] = denom > 0.0 ? weighted_norm(misfit, p.mass) / denom : 0.0;
            fits.push_back(row);
        }
        report["data_fit"] = fits;

        const Vector step = z_bar - z_tilde;
        report["norms"]["step_Mz"] = weighted_norm(step, p.mass);
        report["objective_lf"]["z_tilde"] = objective(p.spec, p.lf.solve(z_tilde), z_tilde);
        report["objective_lf"]["z_bar"] = objective(p.spec, p.lf.solve(z_bar), z_bar);

        // the high-fidelity reference is available only when this run
        // manufactured its own data from the configured model
        const bool hf_available = cfg_.data_mode == "manufacture";
        report["hf_model_available"] = hf_available;
        if (hf_available) {
            const LfOptimum hf_opt = solve_lf_optimum(p.spec, p.hf);
            const Vector& z_star = hf_opt.z_tilde;
            const auto rows = hf_objective_report(
                {{"z_tilde", z_tilde}, {"z_bar", z_bar}, {"z_star", z_star}}, p.hf, p.spec);
            for (const auto& row : rows) {
                report["objective_hf"][row.label] = row.objective;
            }
            const double dist_tilde = weighted_norm(z_tilde - z_star, p.mass);
            const double dist_bar = weighted_norm(z_bar - z_star, p.mass);
            report["norms"]["z_tilde_minus_z_star_Mz"] = dist_tilde;
            report["norms"]["z_bar_minus_z_star_Mz"] = dist_bar;
            report["norms"]["improvement_ratio"] =
                dist_tilde > 0.0 ? dist_bar / dist_tilde : 0.0;
            write_vector_artifact(out_ / "z_star.csv", "z", p.nodes, z_star);
            outputs_.push_back(out_ / "z_star.csv");
        } else {
            note_ = "hf-model-unavailable";
        }

        std::ofstream out_file(out_ / "report.json");
        out_file << report.dump(2) << '\n';
        outputs_.push_back(out_ / "report.json");
    }

    void stage_oracle_check() {
        const auto checks = run_oracle_checks();
        json doc;
        double worst = 0.0;
        for (const auto& [name, err] : checks) {
            doc[name] = err;
            worst = std::max(worst, err);
        }
        doc["worst"] = worst;
        std::ofstream out_file(out_ / "oracle_check.json");
        out_file << doc.dump(2) << '\n';
        outputs_ = {out_ / "oracle_check.json"};
        if (worst > 1e-8) {
            throw SolverError("oracle-check: factored path drifted from the dense oracle (max "
                              "relative error " +
                              std::to_string(worst) + ")");
        }
    }

    const RunConfig& cfg_;
    fs::path out_;
    std::optional<BenchmarkPieces> pieces_;
    std::optional<EllipticPrior> prior_;
    std::vector<fs::path> inputs_;
    std::vector<fs::path> outputs_;
    std::string note_;
};

}  // namespace

DiscrepancyData ingest_data(const fs::path& z_path, const fs::path& y_path, int n_nodes) {
    const csv::Table z_table = csv::read(z_path);
    const csv::Table y_table = csv::read(y_path);
    if (z_table.values.rows() != n_nodes) {
        throw ConfigError("ingest: '" + z_path.string() + "' has " +
                          std::to_string(z_table.values.rows()) + " rows, expected " +
                          std::to_string(n_nodes));
    }
    if (y_table.values.rows() != n_nodes) {
        throw ConfigError("ingest: '" + y_path.string() + "' has " +
                          std::to_string(y_table.values.rows()) + " rows, expected " +
                          std::to_string(n_nodes));
    }
    if (z_table.values.cols() != y_table.values.cols()) {
        throw ConfigError("ingest: Z and Y files have different data column counts");
    }
    DiscrepancyData data;
    data.Z = z_table.values.rightCols(z_table.values.cols() - 1);
    data.Y = y_table.values.rightCols(y_table.values.cols() - 1);
    if (data.count() > 0) {
        const Matrix gram = data.Z.transpose() * data.Z;
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
        const double lam_max = es.eigenvalues().maxCoeff();
        if (lam_max <= 0.0 || es.eigenvalues().minCoeff() <= 1e-12 * lam_max) {
            throw AssumptionError("ingest: controller columns are linearly dependent");
        }
    }
    return data;
}

void save_posterior_mean(const fs::path& dir, const PosteriorMean& pm, const Vector& mesh_nodes) {
    fs::create_directories(dir);
    const int N = pm.count();

    json scalars;
    scalars["alpha"] = pm.alpha;
    scalars["zeta"] = pm.zeta;
    scalars["state_dim"] = pm.state_dim;
    scalars["count"] = N;
    if (N > 0) {
        auto to_array = [](const Vector& v) {
            return std::vector<double>(v.data(), v.data() + v.size());
        };
        scalars["lambda"] = to_array(pm.spectrum.lambda);
        scalars["e_dot_g"] = to_array(pm.spectrum.e_dot_g);
        scalars["s"] = to_array(pm.spectrum.s);
        scalars["a"] = to_array(pm.a);
        json g_cols = json::array();
        json b_rows = json::array();
        json G_rows = json::array();
        for (int i = 0; i < N; ++i) {
            g_cols.push_back(to_array(pm.spectrum.g.col(i)));
            b_rows.push_back(to_array(pm.b.row(i).transpose()));
            G_rows.push_back(to_array(pm.spectrum.G.row(i).transpose()));
        }
        scalars["g_columns"] = g_cols;
        scalars["b_rows"] = b_rows;
        scalars["G_rows"] = G_rows;
    }
    std::ofstream scal(dir / "scalars.json");
    scal << scalars.dump(2) << '\n';

    write_matrix_artifact(dir / "u_ell.csv", "u", mesh_nodes, pm.u);
    write_matrix_artifact(dir / "w.csv", "w", mesh_nodes, pm.spectrum.w);

    std::vector<std::string> header = {"x"};
    Matrix shift(pm.state_dim, 1 + N * N);
    shift.col(0) = mesh_nodes;
    int col = 1;
    for (int i = 0; i < N; ++i) {
        for (int l = 0; l < N; ++l, ++col) {
            header.push_back("u_i" + std::to_string(i + 1) + "_l" + std::to_string(l + 1));
            shift.col(col) = pm.u_shift[static_cast<std::size_t>(i)].col(l);
        }
    }
    csv::write(dir / "u_shift.csv", header, shift);
}

PosteriorMean load_posterior_mean(const fs::path& dir, const ControlVector& z_tilde,
                                  const Matrix& Z) {
    std::ifstream scal(dir / "scalars.json");
    if (!scal) {
        throw MissingInputError("posterior mean: missing '" + (dir / "scalars.json").string() +
                                "'");
    }
    json scalars;
    try {
        scal >> scalars;
    } catch (const json::exception& e) {
        throw ConfigError("posterior mean: cannot parse scalars.json: " + std::string(e.what()));
    }

    PosteriorMean pm;
    pm.alpha = scalars.at("alpha").get<double>();
    pm.zeta = scalars.at("zeta").get<double>();
    pm.state_dim = scalars.at("state_dim").get<int>();
    const int N = scalars.at("count").get<int>();
    pm.z_tilde = z_tilde;
    pm.Z = Z;
    if (static_cast<int>(Z.cols()) != N) {
        throw ConfigError("posterior mean: Z artifact has " + std::to_string(Z.cols()) +
                          " columns but the calibration stored " + std::to_string(N));
    }
    if (N == 0) {
        return pm;
    }

    auto to_vector = [](const json& arr) {
        Vector v(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i) {
            v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
        }
        return v;
    };
    pm.spectrum.lambda = to_vector(scalars.at("lambda"));
    pm.spectrum.e_dot_g = to_vector(scalars.at("e_dot_g"));
    pm.spectrum.s = to_vector(scalars.at("s"));
    pm.a = to_vector(scalars.at("a"));
    pm.spectrum.g.resize(N, N);
    pm.b.resize(N, N);
    pm.spectrum.G.resize(N, N);
    for (int i = 0; i < N; ++i) {
        pm.spectrum.g.col(i) = to_vector(scalars.at("g_columns")[static_cast<std::size_t>(i)]);
        pm.b.row(i) = to_vector(scalars.at("b_rows")[static_cast<std::size_t>(i)]).transpose();
        pm.spectrum.G.row(i) = to_vector(scalars.at("G_rows")[static_cast<std::size_t>(i)]).transpose();
    }

    pm.u = read_matrix_artifact(dir / "u_ell.csv", pm.state_dim);
    pm.spectrum.w = read_matrix_artifact(dir / "w.csv", static_cast<int>(z_tilde.size()));
    const Matrix shift = read_matrix_artifact(dir / "u_shift.csv", pm.state_dim);
    if (shift.cols() != static_cast<Eigen::Index>(N) * N) {
        throw ConfigError("posterior mean: u_shift.csv has unexpected column count");
    }
    pm.u_shift.assign(static_cast<std::size_t>(N), Matrix(pm.state_dim, N));
    int col = 0;
    for (int i = 0; i < N; ++i) {
        for (int l = 0; l < N; ++l, ++col) {
            pm.u_shift[static_cast<std::size_t>(i)].col(l) = shift.col(col);
        }
    }
    return pm;
}

void run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    PipelineRun run(cfg);
    run.run();
}

std::map<std::string, double> run_oracle_checks() {
    using namespace oracle;
    std::map<std::string, double> worst;
    auto record = [&worst](const std::string& name, double err) {
        auto [it, inserted] = worst.try_emplace(name, err);
        if (!inserted) {
            it->second = std::max(it->second, err);
        }
    };

    std::uint64_t seed = 20240811;
    for (int m : {2, 3, 5}) {
        for (int n : {2, 3}) {
            for (int N : {1, 2}) {
                const TinyFixture f = make_tiny_fixture(m, n, N, seed++);
                const DensePosterior dp = dense_oracle_posterior(
                    f.data, f.prior.L(), f.M_z, f.z_tilde, f.zeta, f.alpha);
                const PriorSpec spec{1.0, 1.0, f.zeta, f.alpha};
                const PosteriorMean pm = calibrate(f.data, spec, f.prior, f.z_tilde, f.M_z);
                NormalStream rng(seed, 77);

                // factored delta vs dense A_z theta_bar
                const ThetaVector theta_dense = ThetaVector::unflatten(dp.theta_bar, m, n);
                for (int trial = 0; trial < 5; ++trial) {
                    const Vector z = rng.draw(n);
                    const Vector dense = eval_delta_dense(theta_dense, z, f.M_z);
                    const Vector fact = eval_delta(pm, z, f.M_z);
                    record("eval_delta_vs_dense", (fact - dense).norm() / dense.norm());
                }

                // factored covariance application vs dense Sigma v
                const Vector v = rng.draw(m * (n + 1));
                const Vector dense_cov = dp.Sigma * v;
                const Vector fact_cov =
                    posterior_cov_apply(pm, f.prior, f.M_z, ThetaVector::unflatten(v, m, n))
                        .flatten();
                record("cov_apply_vs_dense", (fact_cov - dense_cov).norm() / dense_cov.norm());

                // factored B theta vs dense product
                Matrix sys_raw(m, m);
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < m; ++j) {
                        sys_raw(i, j) = rng.next();
                    }
                }
                Matrix coupling(m, n);
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < n; ++j) {
                        coupling(i, j) = rng.next();
                    }
                }
                const Matrix sys =
                    sys_raw * sys_raw.transpose() + static_cast<double>(m) * Matrix::Identity(m, m);
                const LinearForwardModel model(sys, coupling, "tiny");
                const ObjectiveSpec ospec{rng.draw(m), 0.5 + rng.uniform(),
                                          f.prior.state_mass(), f.M_z};
                LfOptimum opt;
                opt.z_tilde = f.z_tilde;
                opt.u_tilde = model.solve(f.z_tilde);
                const Vector fact_b = apply_B_thetabar(pm, opt, ospec, model);
                const Vector dense_b =
                    build_B_dense(opt, ospec, model, f.M_z) * dp.theta_bar;
                record("B_theta_vs_dense", (fact_b - dense_b).norm() / dense_b.norm());

                // GSVD identities
                const int p = m * (n + 1);
                const GsvdFactors gf = build_gsvd_factors(pm.spectrum, f.prior, f.zeta, f.alpha);
                record("Xi_orthonormal",
                       (gf.Xi.transpose() * gf.Xi - Matrix::Identity(N * m, N * m)).norm());
                record("Psi_M_theta_orthonormal",
                       (gf.Psi.transpose() * dp.M_theta * gf.Psi - Matrix::Identity(N * m, N * m))
                           .norm());
                const Matrix recon = gf.Xi * gf.phi_squared.cwiseSqrt().asDiagonal() *
                                     gf.Psi.transpose() * dp.M_theta;
                record("A_gsvd_reconstruction", (recon - dp.A).norm() / dp.A.norm());
                const Matrix kron_ref = dp.A * dp.M_theta.inverse() * dp.A.transpose();
                Matrix kron(m * N, m * N);
                const Matrix L_inv = dp.A.cols() > 0
                                         ? f.prior.eigenvectors() *
                                               f.prior.eigenvalues().cwiseInverse().asDiagonal() *
                                               f.prior.eigenvectors().transpose()
                                         : Matrix();
                for (int i = 0; i < N; ++i) {
                    for (int j = 0; j < N; ++j) {
                        kron.block(i * m, j * m, m, m) = pm.spectrum.G(i, j) * L_inv;
                    }
                }
                record("A_Minv_At_kron", (kron_ref - kron).norm() / kron.norm());
                record("M_theta_CCt", (dp.C * dp.C.transpose() - dp.M_theta).norm() /
                                          dp.M_theta.norm());
                record("C_Cinv_identity",
                       (dp.C * dp.C_inv - Matrix::Identity(p, p)).norm());

                // negative-log-posterior stationarity at theta_bar
                const Vector grad = dp.M_theta * dp.theta_bar +
                                    dp.A.transpose() * (dp.A * dp.theta_bar - dp.b) / f.alpha;
                record("posterior_stationarity",
                       grad.norm() / (dp.A.transpose() * dp.b / f.alpha).norm());
            }
        }
    }
    return worst;
}

}  // namespace postopt

#include "postopt/forward_model.hpp"

#include <Eigen/Eigenvalues>

#include "postopt/errors.hpp"
#include "postopt/fe.hpp"

namespace postopt {

namespace {
constexpr double kSolveResidualTol = 1e-10;
}

LinearForwardModel::LinearForwardModel(Matrix system, Matrix coupling, std::string name)
    : system_(std::move(system)), coupling_(std::move(coupling)), name_(std::move(name)) {
    if (system_.rows() != system_.cols()) {
        throw std::invalid_argument(name_ + ": system matrix must be square");
    }
    if (coupling_.rows() != system_.rows()) {
        throw std::invalid_argument(name_ + ": coupling rows must match system order");
    }
    lu_.compute(system_);
    lu_transpose_.compute(system_.transpose());
    const Vector pivots = lu_.matrixLU().diagonal().cwiseAbs();
    if (!(pivots.minCoeff() > 1e-14 * pivots.maxCoeff())) {
        throw SolverError(name_ + ": system matrix is numerically singular");
    }
}

LinearForwardModel LinearForwardModel::diffusion(const Mesh1D& mesh, double kappa,
                                                 double h_robin) {
    SymMatrix K = fe::assemble_stiffness(mesh, kappa, h_robin);
    SymMatrix M = fe::assemble_mass(mesh);
    return LinearForwardModel(std::move(K.entries), std::move(M.entries), "diffusion");
}

LinearForwardModel LinearForwardModel::advection_diffusion(const Mesh1D& mesh, double kappa,
                                                           double v, double h_robin) {
    SymMatrix K = fe::assemble_stiffness(mesh, kappa, h_robin);
    GenMatrix A = fe::assemble_advection(mesh, v);
    SymMatrix M = fe::assemble_mass(mesh);
    Matrix system = K.entries + A.entries;
    return LinearForwardModel(std::move(system), std::move(M.entries), "advection-diffusion");
}

StateVector LinearForwardModel::solve(const ControlVector& z) const {
    if (z.size() != coupling_.cols()) {
        throw std::invalid_argument(name_ + ": control vector has wrong length");
    }
    const Vector rhs = coupling_ * z;
    StateVector u = lu_.solve(rhs);
    const double rhs_norm = rhs.norm();
    if ((system_ * u - rhs).norm() > kSolveResidualTol * rhs_norm) {
        throw SolverError(name_ + ": solve residual exceeds tolerance");
    }
    return u;
}

StateVector LinearForwardModel::jacobian_apply(const ControlVector& w) const {
    return lu_.solve(coupling_ * w);
}

ControlVector LinearForwardModel::jacobian_adjoint_apply(const StateVector& r) const {
    if (r.size() != system_.rows()) {
        throw std::invalid_argument(name_ + ": state vector has wrong length");
    }
    return coupling_.transpose() * lu_transpose_.solve(r);
}

DiscrepancyData generate_discrepancy_data(const LinearForwardModel& lf,
                                          const LinearForwardModel& hf, const Matrix& Z) {
    if (lf.state_dim() != hf.state_dim() || lf.control_dim() != hf.control_dim()) {
        throw std::invalid_argument("generate_discrepancy_data: models live on different meshes");
    }
    const int N = static_cast<int>(Z.cols());
    if (N > 0) {
        const Matrix gram = Z.transpose() * Z;
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
        const double lam_max = es.eigenvalues().maxCoeff();
        if (lam_max <= 0.0 || es.eigenvalues().minCoeff() <= 1e-12 * lam_max) {
            throw AssumptionError(
                "generate_discrepancy_data: controllers are linearly dependent (Gram matrix "
                "rank-deficient)");
        }
    }
    DiscrepancyData data;
    data.Z = Z;
    data.Y.resize(lf.state_dim(), N);
    for (int l = 0; l < N; ++l) {
        data.Y.col(l) = hf.solve(Z.col(l)) - lf.solve(Z.col(l));
    }
    return data;
}

}  // namespace postopt

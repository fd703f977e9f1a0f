#include "postopt/prior.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "postopt/errors.hpp"
#include "postopt/fe.hpp"

namespace postopt {

void PriorSpec::validate() const {
    if (gamma <= 0.0 || epsilon <= 0.0 || zeta <= 0.0 || alpha <= 0.0) {
        throw std::invalid_argument("PriorSpec: gamma, epsilon, zeta, alpha must be positive");
    }
}

EllipticPrior::EllipticPrior(Matrix L, Vector rho, Matrix V, Matrix M_u)
    : L_(std::move(L)), rho_(std::move(rho)), V_(std::move(V)), M_u_(std::move(M_u)) {
    const int m = dim();
    if (rho_.minCoeff() <= 0.0) {
        throw AssumptionError("EllipticPrior: L is not positive definite");
    }
    const double ortho = (V_.transpose() * V_ - Matrix::Identity(m, m)).norm();
    if (ortho > 1e-10) {
        throw SolverError("EllipticPrior: eigenvectors lost orthonormality");
    }
    const double recon = (L_ - V_ * rho_.asDiagonal() * V_.transpose()).norm() / L_.norm();
    if (recon > 1e-8) {
        throw SolverError("EllipticPrior: spectral reconstruction of L out of tolerance");
    }
}

namespace {

// Spectral solves of L inherit a residual of order cond(L) * eps, which at
// benchmark scale (cond ~ 1e7) sits right at the 1e-9 contract. A couple of
// refinement sweeps push it well below.
template <typename Solve, typename Apply>
Vector refined_solve(const Vector& rhs, Solve solve, Apply apply) {
    Vector x = solve(rhs);
    const double rhs_norm = rhs.norm();
    for (int sweep = 0; sweep < 2; ++sweep) {
        const Vector residual = rhs - apply(x);
        if (residual.norm() <= 0.1e-9 * rhs_norm) {
            break;
        }
        x += solve(residual);
    }
    return x;
}

}  // namespace

Vector EllipticPrior::solve_L(const Vector& y) const {
    auto solve = [this](const Vector& r) -> Vector {
        return V_ * (V_.transpose() * r).cwiseQuotient(rho_);
    };
    auto apply = [this](const Vector& x) -> Vector { return L_ * x; };
    return refined_solve(y, solve, apply);
}

Vector EllipticPrior::solve_shifted(double alpha, double lambda, const Vector& rhs) const {
    const Vector shifted = (alpha * rho_).array() + lambda;
    auto solve = [&](const Vector& r) -> Vector {
        return V_ * (V_.transpose() * r).cwiseQuotient(shifted);
    };
    auto apply = [&](const Vector& x) -> Vector {
        return alpha * (L_ * x) + lambda * x;
    };
    return refined_solve(rhs, solve, apply);
}

Vector EllipticPrior::apply_L_inv_sqrt(const Vector& x) const {
    return V_ * (V_.transpose() * x).cwiseQuotient(rho_.cwiseSqrt());
}

EllipticPrior build_elliptic_prior(const Mesh1D& mesh, double gamma, double epsilon) {
    if (gamma <= 0.0 || epsilon <= 0.0) {
        throw std::invalid_argument("build_elliptic_prior: gamma and epsilon must be positive");
    }
    SymMatrix K_neumann = fe::assemble_stiffness(mesh, 1.0, 0.0);
    SymMatrix M = fe::assemble_mass(mesh);
    const Matrix D = gamma * (epsilon * K_neumann.entries + M.entries);

    Eigen::LLT<Matrix> mass_llt(M.entries);
    if (mass_llt.info() != Eigen::Success) {
        throw AssumptionError("build_elliptic_prior: mass matrix is not positive definite");
    }
    Matrix L = D * mass_llt.solve(D);
    L = 0.5 * (L + L.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> es(L);
    if (es.info() != Eigen::Success) {
        throw SolverError("build_elliptic_prior: eigensolver failed on L");
    }
    return EllipticPrior(std::move(L), es.eigenvalues(), es.eigenvectors(), M.entries);
}

}  // namespace postopt

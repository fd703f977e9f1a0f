#pragma once

#include "postopt/types.hpp"

namespace postopt {

/// Hyperparameters of the discrepancy prior and noise model.
struct PriorSpec {
    double gamma = 1.0;    // magnitude of prior realizations
    double epsilon = 0.0;  // smoothness (elliptic operator coefficient)
    double zeta = 1.0;     // controller length scale
    double alpha = 0.0;    // noise variance

    void validate() const;
};

/// Spectral form of the state-space weight L = D M^-1 D, with D the
/// discretization of gamma(-epsilon Lap + I) under zero-Neumann conditions.
///
/// L is kept as a coordinate-space SPD matrix with a standard eigenvalue
/// decomposition L = V diag(rho) V^T, V^T V = I; the shifted systems
/// (alpha L + lambda I) are diagonal in that basis.
class EllipticPrior {
public:
    EllipticPrior(Matrix L, Vector rho, Matrix V, Matrix M_u);

    int dim() const { return static_cast<int>(rho_.size()); }
    const Matrix& L() const { return L_; }
    const Vector& eigenvalues() const { return rho_; }
    const Matrix& eigenvectors() const { return V_; }
    const Matrix& state_mass() const { return M_u_; }

    Vector apply_L(const Vector& x) const { return L_ * x; }
    Vector solve_L(const Vector& y) const;

    /// (alpha L + lambda I)^-1 rhs through the eigenbasis.
    Vector solve_shifted(double alpha, double lambda, const Vector& rhs) const;

    /// Symmetric inverse square root L^-1/2 x = V diag(rho^-1/2) V^T x.
    Vector apply_L_inv_sqrt(const Vector& x) const;

private:
    Matrix L_;
    Vector rho_;
    Matrix V_;
    Matrix M_u_;
};

/// Assemble D = gamma (epsilon K_neumann + M_u) and the spectral form of
/// L = D M_u^-1 D. Throws on nonpositive coefficients or eigensolver failure.
EllipticPrior build_elliptic_prior(const Mesh1D& mesh, double gamma, double epsilon);

}  // namespace postopt

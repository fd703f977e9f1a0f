#pragma once

#include "postopt/calibration.hpp"
#include "postopt/control.hpp"
#include "postopt/prior.hpp"
#include "postopt/types.hpp"

// Dense brute-force references for the factored calibration path. Everything
// here materializes objects in R^p, p = m(n+1), and is guarded to tiny scale
// (p <= 1000). The CLI oracle-check stage and the test suites compare the
// production path against these.
namespace postopt::oracle {

/// Structured vector in R^p: intercept block theta_0 in R^m followed by the
/// m controller-functional blocks theta_1..theta_m (each in R^n).
struct ThetaVector {
    Vector intercept;  // m
    Matrix linear;     // n x m, column k = theta_k

    Vector flatten() const;
    static ThetaVector unflatten(const Vector& theta, int m, int n);
};

/// Dense posterior pieces from direct evaluation of the Gaussian formulas.
struct DensePosterior {
    Matrix M_theta;
    Matrix C;
    Matrix C_inv;
    Matrix A;          // mN x p
    Vector b;          // stacked data
    Vector theta_bar;  // (M_theta + A^T A / alpha)^-1 A^T b / alpha
    Matrix Sigma;      // dense posterior covariance
};

void guard_tiny_scale(int m, int n);

Matrix build_M_theta_dense(const Matrix& L, const Matrix& M_z, const ControlVector& z_tilde,
                           double zeta);
Matrix build_C_dense(const Matrix& L, const Matrix& M_z, const ControlVector& z_tilde,
                     double zeta);
Matrix build_C_inv_dense(const Matrix& L, const Matrix& M_z, const ControlVector& z_tilde,
                         double zeta);
Matrix build_A_dense(const Matrix& Z, const Matrix& M_z, int m);

/// Symmetric spectral square root of an SPD matrix.
Matrix spectral_sqrt(const Matrix& S);

DensePosterior dense_oracle_posterior(const DiscrepancyData& data, const Matrix& L,
                                      const Matrix& M_z, const ControlVector& z_tilde, double zeta,
                                      double alpha);

/// delta(z, theta) = A_z theta for a dense theta.
StateVector eval_delta_dense(const ThetaVector& theta, const ControlVector& z, const Matrix& M_z);

/// theta^T M_theta theta with M_theta assembled blockwise. Equals the average
/// squared L-norm of delta(z, theta) under z ~ N(z~, zeta^2 M_z^-1).
double prior_weighted_norm(const EllipticPrior& prior, double zeta, const ControlVector& z_tilde,
                           const Matrix& M_z, const ThetaVector& theta);

/// Right generalized singular vectors Psi (columns ordered i-major, j-minor)
/// and the matching diagonals: squared singular values lambda_i / rho_j and
/// covariance weights lambda_i / (lambda_i + alpha rho_j).
struct GsvdFactors {
    Matrix Xi;
    Matrix Psi;
    Vector phi_squared;
    Vector d_weights;
};

GsvdFactors build_gsvd_factors(const GSpectrum& spectrum, const EllipticPrior& prior, double zeta,
                               double alpha);

/// Posterior covariance application Sigma v = M_theta^-1 v - Psi D Psi^T v
/// from the factored pieces (dense assembly, tiny scale only).
ThetaVector posterior_cov_apply(const PosteriorMean& pm, const EllipticPrior& prior,
                                const Matrix& M_z, const ThetaVector& v);

/// Dense mixed second derivative
///   B = gradS^T M_u [I | I kron z~^T M_z] + [0 | grad_u J kron M_z].
Matrix build_B_dense(const LfOptimum& optimum, const ObjectiveSpec& spec,
                     const LinearForwardModel& lf_model, const Matrix& M_z);

/// Deterministic randomized fixture for the factored-vs-dense suites:
/// elliptic prior on an m-node mesh, random SPD M_z, random controller and
/// discrepancy data.
struct TinyFixture {
    Matrix M_z;
    EllipticPrior prior;
    ControlVector z_tilde;
    DiscrepancyData data;
    double zeta = 0.0;
    double alpha = 0.0;
};

TinyFixture make_tiny_fixture(int m, int n, int N, std::uint64_t seed);

}  // namespace postopt::oracle

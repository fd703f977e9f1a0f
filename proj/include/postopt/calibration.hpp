#pragma once

#include <vector>

#include "postopt/prior.hpp"
#include "postopt/types.hpp"

namespace postopt {

/// Eigenstructure of the controller-data matrix
///   G = e e^T + zeta^-2 (Z - z~ e^T)^T M_z (Z - z~ e^T)
/// together with the derived vectors w_i = Z g_i - (e^T g_i) z~ and scalars
/// s_i = e^T g_i - zeta^-2 w_i^T M_z z~.
struct GSpectrum {
    Matrix G;        // N x N
    Vector lambda;   // eigenvalues, ascending
    Matrix g;        // eigenvectors, column i
    Vector e_dot_g;  // e^T g_i
    Matrix w;        // n x N, column i = w_i
    Vector s;        // s_i
};

/// Factored posterior mean of the discrepancy parameters. Never materializes
/// theta in R^p: it holds the per-datum solves u_l = L^-1 y_l, the shifted
/// solves u_{i,l} = (alpha L + lambda_i I)^-1 u_l and the scalar tables a_l,
/// b_{i,l} of the closed-form expression.
struct PosteriorMean {
    double alpha = 0.0;
    double zeta = 1.0;
    int state_dim = 0;
    ControlVector z_tilde;
    Matrix Z;                     // n x N controller data
    GSpectrum spectrum;
    Matrix u;                     // m x N, column l = u_l
    std::vector<Matrix> u_shift;  // u_shift[i] is m x N, column l = u_{i,l}
    Vector a;                     // a_l
    Matrix b;                     // b(i, l)

    int count() const { return static_cast<int>(Z.cols()); }
};

/// Fill the derived quantities (e_dot_g, w, s) from an eigendecomposition of
/// G. Split out so tests can flip eigenvector signs and rebuild.
GSpectrum finalize_g_spectrum(Matrix G, Vector lambda, Matrix g, const Matrix& Z,
                              const ControlVector& z_tilde, const Matrix& M_z, double zeta);

/// Build G, eigendecompose it and derive (w_i, s_i). Raises AssumptionError
/// when G is numerically rank-deficient (relative condition cutoff 1e-12),
/// which signals near-dependent controller data; dropping a data pair is the
/// usual remedy.
GSpectrum build_G_spectrum(const Matrix& Z, const ControlVector& z_tilde, const Matrix& M_z,
                           double zeta);

/// Closed-form Gaussian posterior mean from N high-fidelity data pairs.
/// N == 0 yields the zero posterior mean (pure prior), so downstream updates
/// degrade to z_bar == z_tilde.
PosteriorMean calibrate(const DiscrepancyData& data, const PriorSpec& prior_spec,
                        const EllipticPrior& prior, const ControlVector& z_tilde,
                        const Matrix& M_z);

/// Variant taking a precomputed G spectrum (sign-invariance tests).
PosteriorMean calibrate_with_spectrum(const DiscrepancyData& data, double alpha, double zeta,
                                      const EllipticPrior& prior, const ControlVector& z_tilde,
                                      const Matrix& M_z, GSpectrum spectrum);

/// Evaluate the posterior-mean discrepancy at a controller:
///   delta(z) = 1/alpha sum_l [ (a_l + zeta^-2 (z_l - z~)^T M_z z) u_l
///              - sum_i b_{i,l} (s_i + zeta^-2 w_i^T M_z z) u_{i,l} ].
/// Affine in z.
StateVector eval_delta(const PosteriorMean& pm, const ControlVector& z, const Matrix& M_z);

}  // namespace postopt

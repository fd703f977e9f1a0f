#include "postopt/oracle.hpp"

#include <Eigen/Eigenvalues>

#include "postopt/errors.hpp"
#include "postopt/rng.hpp"

namespace postopt::oracle {

namespace {
constexpr int kTinyScaleLimit = 1000;
}

void guard_tiny_scale(int m, int n) {
    const int p = m * (n + 1);
    if (p > kTinyScaleLimit) {
        throw std::invalid_argument("dense oracle: p = m(n+1) exceeds the tiny-scale limit");
    }
}

Vector ThetaVector::flatten() const {
    const int m = static_cast<int>(intercept.size());
    const int n = static_cast<int>(linear.rows());
    Vector theta(m * (n + 1));
    theta.head(m) = intercept;
    for (int k = 0; k < m; ++k) {
        theta.segment(m + k * n, n) = linear.col(k);
    }
    return theta;
}

ThetaVector ThetaVector::unflatten(const Vector& theta, int m, int n) {
    ThetaVector out;
    out.intercept = theta.head(m);
    out.linear.resize(n, m);
    for (int k = 0; k < m; ++k) {
        out.linear.col(k) = theta.segment(m + k * n, n);
    }
    return out;
}

Matrix build_M_theta_dense(const Matrix& L, const Matrix& M_z, const ControlVector& z_tilde,
                           double zeta) {
    const int m = static_cast<int>(L.rows());
    const int n = static_cast<int>(M_z.rows());
    guard_tiny_scale(m, n);
    const int p = m * (n + 1);
    const Vector Mz_zt = M_z * z_tilde;
    const Matrix W = zeta * zeta * M_z + Mz_zt * Mz_zt.transpose();

    Matrix M_theta = Matrix::Zero(p, p);
    M_theta.topLeftCorner(m, m) = L;
    for (int k = 0; k < m; ++k) {
        M_theta.block(0, m + k * n, m, n) = L.col(k) * Mz_zt.transpose();
        M_theta.block(m + k * n, 0, n, m) = Mz_zt * L.row(k);
        for (int k2 = 0; k2 < m; ++k2) {
            M_theta.block(m + k * n, m + k2 * n, n, n) = L(k, k2) * W;
        }
    }
    return M_theta;
}

Matrix spectral_sqrt(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw AssumptionError("spectral_sqrt: matrix is not positive definite");
    }
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

namespace {

Matrix spectral_pow(const Matrix& S, double exponent) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw AssumptionError("spectral_pow: matrix is not positive definite");
    }
    return es.eigenvectors() * es.eigenvalues().array().pow(exponent).matrix().asDiagonal() *
           es.eigenvectors().transpose();
}

// Assemble [[P, 0], [Q kron v, R kron S]] style two-block-column operators
// shared by C and C^-1.
Matrix assemble_C_like(const Matrix& topleft, const Matrix& lower_outer, const Vector& lower_vec,
                       const Matrix& lower_diag_outer, const Matrix& lower_diag_inner) {
    const int m = static_cast<int>(topleft.rows());
    const int n = static_cast<int>(lower_vec.size());
    const int p = m * (n + 1);
    Matrix C = Matrix::Zero(p, p);
    C.topLeftCorner(m, m) = topleft;
    for (int k = 0; k < m; ++k) {
        C.block(m + k * n, 0, n, m) = lower_vec * lower_outer.row(k);
        for (int k2 = 0; k2 < m; ++k2) {
            C.block(m + k * n, m + k2 * n, n, n) = lower_diag_outer(k, k2) * lower_diag_inner;
        }
    }
    return C;
}

}  // namespace

Matrix build_C_dense(const Matrix& L, const Matrix& M_z, const ControlVector& z_tilde,
                     double zeta) {
    const int m = static_cast<int>(L.rows());
    const int n = static_cast<int>(M_z.rows());
    guard_tiny_scale(m, n);
    const Matrix L_half = spectral_sqrt(L);
    const Matrix Mz_half = spectral_sqrt(M_z);
    return assemble_C_like(L_half, L_half, M_z * z_tilde, L_half, zeta * Mz_half);
}

Matrix build_C_inv_dense(const Matrix& L, const Matrix& M_z, const ControlVector& z_tilde,
                         double zeta) {
    const int m = static_cast<int>(L.rows());
    const int n = static_cast<int>(M_z.rows());
    guard_tiny_scale(m, n);
    const Matrix L_invhalf = spectral_pow(L, -0.5);
    const Matrix Mz_half = spectral_sqrt(M_z);
    const Matrix Mz_invhalf = spectral_pow(M_z, -0.5);
    const Vector lower = -(Mz_half * z_tilde) / zeta;
    return assemble_C_like(L_invhalf, L_invhalf, lower, L_invhalf, Mz_invhalf / zeta);
}

Matrix build_A_dense(const Matrix& Z, const Matrix& M_z, int m) {
    const int n = static_cast<int>(Z.rows());
    guard_tiny_scale(m, n);
    const int N = static_cast<int>(Z.cols());
    const int p = m * (n + 1);
    Matrix A = Matrix::Zero(m * N, p);
    for (int l = 0; l < N; ++l) {
        const Vector MzZl = M_z * Z.col(l);
        for (int i = 0; i < m; ++i) {
            A(l * m + i, i) = 1.0;
            A.block(l * m + i, m + i * n, 1, n) = MzZl.transpose();
        }
    }
    return A;
}

DensePosterior dense_oracle_posterior(const DiscrepancyData& data, const Matrix& L,
                                      const Matrix& M_z, const ControlVector& z_tilde, double zeta,
                                      double alpha) {
    const int m = static_cast<int>(L.rows());
    const int n = static_cast<int>(M_z.rows());
    guard_tiny_scale(m, n);
    const int N = data.count();

    DensePosterior dp;
    dp.M_theta = build_M_theta_dense(L, M_z, z_tilde, zeta);
    dp.C = build_C_dense(L, M_z, z_tilde, zeta);
    dp.C_inv = build_C_inv_dense(L, M_z, z_tilde, zeta);
    dp.A = build_A_dense(data.Z, M_z, m);
    dp.b.resize(m * N);
    for (int l = 0; l < N; ++l) {
        dp.b.segment(l * m, m) = data.Y.col(l);
    }
    const Matrix Sigma_inv = dp.M_theta + dp.A.transpose() * dp.A / alpha;
    dp.Sigma = Sigma_inv.inverse();
    dp.theta_bar = dp.Sigma * (dp.A.transpose() * dp.b) / alpha;
    return dp;
}

StateVector eval_delta_dense(const ThetaVector& theta, const ControlVector& z, const Matrix& M_z) {
    const Vector Mz_z = M_z * z;
    return theta.intercept + theta.linear.transpose() * Mz_z;
}

double prior_weighted_norm(const EllipticPrior& prior, double zeta, const ControlVector& z_tilde,
                           const Matrix& M_z, const ThetaVector& theta) {
    const Matrix M_theta = build_M_theta_dense(prior.L(), M_z, z_tilde, zeta);
    const Vector flat = theta.flatten();
    return flat.dot(M_theta * flat);
}

GsvdFactors build_gsvd_factors(const GSpectrum& spectrum, const EllipticPrior& prior, double zeta,
                               double alpha) {
    const int N = static_cast<int>(spectrum.lambda.size());
    const int m = prior.dim();
    const int n = static_cast<int>(spectrum.w.rows());
    guard_tiny_scale(m, n);
    const Vector& rho = prior.eigenvalues();
    const Matrix& V = prior.eigenvectors();
    const int p = m * (n + 1);

    GsvdFactors f;
    f.Xi.resize(m * N, N * m);
    f.Psi.resize(p, N * m);
    f.phi_squared.resize(N * m);
    f.d_weights.resize(N * m);
    int col = 0;
    for (int i = 0; i < N; ++i) {
        const double lambda_i = spectrum.lambda[i];
        for (int j = 0; j < m; ++j, ++col) {
            const double rho_j = rho[j];
            const Vector lj = V.col(j);
            for (int l = 0; l < N; ++l) {
                f.Xi.block(l * m, col, m, 1) = spectrum.g(l, i) * lj;
            }
            Vector psi = Vector::Zero(p);
            psi.head(m) = spectrum.s[i] * lj;
            for (int k = 0; k < m; ++k) {
                psi.segment(m + k * n, n) = lj[k] * spectrum.w.col(i) / (zeta * zeta);
            }
            f.Psi.col(col) = psi / std::sqrt(lambda_i * rho_j);
            f.phi_squared[col] = lambda_i / rho_j;
            f.d_weights[col] = lambda_i / (lambda_i + alpha * rho_j);
        }
    }
    return f;
}

ThetaVector posterior_cov_apply(const PosteriorMean& pm, const EllipticPrior& prior,
                                const Matrix& M_z, const ThetaVector& v) {
    const int m = prior.dim();
    const int n = static_cast<int>(M_z.rows());
    guard_tiny_scale(m, n);
    const Matrix C_inv = build_C_inv_dense(prior.L(), M_z, pm.z_tilde, pm.zeta);
    const Vector flat = v.flatten();
    Vector result = C_inv.transpose() * (C_inv * flat);  // M_theta^-1 v
    if (pm.count() > 0) {
        const GsvdFactors f = build_gsvd_factors(pm.spectrum, prior, pm.zeta, pm.alpha);
        result -= f.Psi * f.d_weights.cwiseProduct(f.Psi.transpose() * flat);
    }
    return ThetaVector::unflatten(result, m, n);
}

TinyFixture make_tiny_fixture(int m, int n, int N, std::uint64_t seed) {
    guard_tiny_scale(m, n);
    NormalStream rng(seed, 0xf1f1);
    const Mesh1D mesh = Mesh1D::unit_interval(m);
    const double gamma = 0.6 + rng.uniform();
    const double epsilon = 0.02 + 0.1 * rng.uniform();

    Matrix R(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            R(i, j) = rng.next();
        }
    }
    Matrix M_z = R * R.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);

    TinyFixture f{std::move(M_z), build_elliptic_prior(mesh, gamma, epsilon), rng.draw(n),
                  DiscrepancyData{}, 1.0 + rng.uniform(), 0.05 + rng.uniform()};
    f.data.Z.resize(n, N);
    f.data.Y.resize(m, N);
    for (int l = 0; l < N; ++l) {
        f.data.Z.col(l) = rng.draw(n);
        f.data.Y.col(l) = rng.draw(m);
    }
    return f;
}

Matrix build_B_dense(const LfOptimum& optimum, const ObjectiveSpec& spec,
                     const LinearForwardModel& lf_model, const Matrix& M_z) {
    const int m = lf_model.state_dim();
    const int n = lf_model.control_dim();
    guard_tiny_scale(m, n);
    const int p = m * (n + 1);

    // gradS column by column
    Matrix gradS(m, n);
    ControlVector e = ControlVector::Zero(n);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        gradS.col(j) = lf_model.jacobian_apply(e);
        e[j] = 0.0;
    }
    const Matrix GtMu = gradS.transpose() * spec.M_u;          // n x m
    const Vector g_u = spec.M_u * (optimum.u_tilde - spec.target);
    const Vector Mz_zt = M_z * optimum.z_tilde;

    Matrix B = Matrix::Zero(n, p);
    B.leftCols(m) = GtMu;
    for (int k = 0; k < m; ++k) {
        B.block(0, m + k * n, n, n) = GtMu.col(k) * Mz_zt.transpose() + g_u[k] * M_z;
    }
    return B;
}

}  // namespace postopt::oracle

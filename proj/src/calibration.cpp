#include "postopt/calibration.hpp"

#include <Eigen/Eigenvalues>

#include "postopt/errors.hpp"

namespace postopt {

GSpectrum finalize_g_spectrum(Matrix G, Vector lambda, Matrix g, const Matrix& Z,
                              const ControlVector& z_tilde, const Matrix& M_z, double zeta) {
    const int N = static_cast<int>(G.rows());
    GSpectrum gs;
    gs.G = std::move(G);
    gs.lambda = std::move(lambda);
    gs.g = std::move(g);
    gs.e_dot_g = gs.g.colwise().sum().transpose();
    gs.w.resize(Z.rows(), N);
    gs.s.resize(N);
    const Vector Mz_zt = M_z * z_tilde;
    for (int i = 0; i < N; ++i) {
        gs.w.col(i) = Z * gs.g.col(i) - gs.e_dot_g[i] * z_tilde;
        gs.s[i] = gs.e_dot_g[i] - gs.w.col(i).dot(Mz_zt) / (zeta * zeta);
    }
    return gs;
}

GSpectrum build_G_spectrum(const Matrix& Z, const ControlVector& z_tilde, const Matrix& M_z,
                           double zeta) {
    const int N = static_cast<int>(Z.cols());
    const Matrix centered = Z.colwise() - z_tilde;
    Matrix G = Matrix::Ones(N, N) + centered.transpose() * M_z * centered / (zeta * zeta);
    G = 0.5 * (G + G.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success) {
        throw SolverError("build_G_spectrum: eigensolver failed on G");
    }
    const double lam_max = es.eigenvalues().maxCoeff();
    if (lam_max <= 0.0 || es.eigenvalues().minCoeff() <= 1e-12 * lam_max) {
        throw AssumptionError(
            "build_G_spectrum: controller-data matrix G is numerically singular; the probed "
            "controllers are nearly dependent (consider dropping a data pair)");
    }
    return finalize_g_spectrum(std::move(G), es.eigenvalues(), es.eigenvectors(), Z, z_tilde, M_z,
                               zeta);
}

PosteriorMean calibrate_with_spectrum(const DiscrepancyData& data, double alpha, double zeta,
                                      const EllipticPrior& prior, const ControlVector& z_tilde,
                                      const Matrix& M_z, GSpectrum spectrum) {
    if (alpha <= 0.0) {
        throw std::invalid_argument("calibrate: alpha must be positive");
    }
    const int N = data.count();
    const int m = prior.dim();
    if (data.Y.rows() != m) {
        throw std::invalid_argument("calibrate: data state dimension does not match prior");
    }
    if (data.Z.rows() != z_tilde.size()) {
        throw std::invalid_argument("calibrate: controller dimension mismatch");
    }

    PosteriorMean pm;
    pm.alpha = alpha;
    pm.zeta = zeta;
    pm.state_dim = m;
    pm.z_tilde = z_tilde;
    pm.Z = data.Z;
    pm.spectrum = std::move(spectrum);
    pm.u.resize(m, N);
    pm.u_shift.assign(N, Matrix(m, N));
    pm.a.resize(N);
    pm.b.resize(N, N);

    for (int l = 0; l < N; ++l) {
        const Vector y = data.Y.col(l);
        pm.u.col(l) = prior.solve_L(y);
        const double y_norm = y.norm();
        if (y_norm > 0.0 && (prior.apply_L(pm.u.col(l)) - y).norm() > 1e-9 * y_norm) {
            throw SolverError("calibrate: L solve residual exceeds tolerance");
        }
    }
    for (int i = 0; i < N; ++i) {
        const double lambda_i = pm.spectrum.lambda[i];
        for (int l = 0; l < N; ++l) {
            const Vector rhs = pm.u.col(l);
            pm.u_shift[i].col(l) = prior.solve_shifted(alpha, lambda_i, rhs);
            const double rhs_norm = rhs.norm();
            const Vector residual = alpha * prior.apply_L(pm.u_shift[i].col(l)) +
                                    lambda_i * pm.u_shift[i].col(l) - rhs;
            if (rhs_norm > 0.0 && residual.norm() > 1e-9 * rhs_norm) {
                throw SolverError("calibrate: shifted solve residual exceeds tolerance");
            }
        }
    }

    const double zeta2_inv = 1.0 / (zeta * zeta);
    const Vector Mz_zt = M_z * z_tilde;
    const Matrix Mz_Zg = M_z * (pm.Z * pm.spectrum.g);  // column i = M_z Z g_i
    for (int l = 0; l < N; ++l) {
        const Vector diff = pm.Z.col(l) - z_tilde;
        pm.a[l] = 1.0 - zeta2_inv * Mz_zt.dot(diff);
        for (int i = 0; i < N; ++i) {
            pm.b(i, l) = zeta2_inv * diff.dot(Mz_Zg.col(i)) + pm.spectrum.e_dot_g[i] * pm.a[l];
        }
    }
    return pm;
}

PosteriorMean calibrate(const DiscrepancyData& data, const PriorSpec& prior_spec,
                        const EllipticPrior& prior, const ControlVector& z_tilde,
                        const Matrix& M_z) {
    prior_spec.validate();
    if (data.count() == 0) {
        PosteriorMean pm;
        pm.alpha = prior_spec.alpha;
        pm.zeta = prior_spec.zeta;
        pm.state_dim = prior.dim();
        pm.z_tilde = z_tilde;
        pm.Z.resize(z_tilde.size(), 0);
        return pm;
    }
    GSpectrum gs = build_G_spectrum(data.Z, z_tilde, M_z, prior_spec.zeta);
    return calibrate_with_spectrum(data, prior_spec.alpha, prior_spec.zeta, prior, z_tilde, M_z,
                                   std::move(gs));
}

StateVector eval_delta(const PosteriorMean& pm, const ControlVector& z, const Matrix& M_z) {
    const int N = pm.count();
    if (N == 0) {
        return StateVector::Zero(pm.state_dim);
    }
    if (z.size() != pm.z_tilde.size()) {
        throw std::invalid_argument("eval_delta: controller has wrong length");
    }
    const double zeta2_inv = 1.0 / (pm.zeta * pm.zeta);
    const Vector Mz_z = M_z * z;
    StateVector delta = StateVector::Zero(pm.state_dim);
    for (int l = 0; l < N; ++l) {
        const double coeff = pm.a[l] + zeta2_inv * (pm.Z.col(l) - pm.z_tilde).dot(Mz_z);
        delta += coeff * pm.u.col(l);
        for (int i = 0; i < N; ++i) {
            const double shift_coeff =
                pm.spectrum.s[i] + zeta2_inv * pm.spectrum.w.col(i).dot(Mz_z);
            delta -= pm.b(i, l) * shift_coeff * pm.u_shift[i].col(l);
        }
    }
    return delta / pm.alpha;
}

}  // namespace postopt

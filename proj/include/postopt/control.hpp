#pragma once

#include <Eigen/Cholesky>

#include "postopt/forward_model.hpp"
#include "postopt/types.hpp"

namespace postopt {

/// Quadratic tracking objective
///   J(u, z) = 1/2 (u - target)^T M_u (u - target) + beta/2 z^T M_z z.
struct ObjectiveSpec {
    StateVector target;
    double beta = 0.0;
    Matrix M_u;
    Matrix M_z;
};

/// Minimizer of the low-fidelity problem together with its certificates.
struct LfOptimum {
    ControlVector z_tilde;
    StateVector u_tilde;
    double gradient_norm = 0.0;
    double objective_value = 0.0;
};

double objective(const ObjectiveSpec& spec, const StateVector& u, const ControlVector& z);

/// grad J(z) = gradS^T M_u (S(z) - target) + beta M_z z in reduced space.
ControlVector gradient(const ObjectiveSpec& spec, const LinearForwardModel& model,
                       const ControlVector& z);

/// H w = gradS^T M_u gradS w + beta M_z w, matrix-free.
ControlVector hessian_apply(const ObjectiveSpec& spec, const LinearForwardModel& model,
                            const ControlVector& w);

/// Reduced Hessian assembled densely (column by column through hessian_apply)
/// and factorized once. Positive definiteness is certified by the Cholesky
/// factorization succeeding.
class ReducedHessian {
public:
    ReducedHessian(const ObjectiveSpec& spec, const LinearForwardModel& model);

    ControlVector apply(const ControlVector& w) const { return dense_ * w; }

    /// H^-1 r with relative residual enforced at 1e-10.
    ControlVector solve(const ControlVector& r) const;

    const Matrix& dense() const { return dense_; }

private:
    Matrix dense_;
    Eigen::LLT<Matrix> llt_;
};

/// Solve the convex quadratic problem min J(S(z), z) via the SPD normal
/// equations H z = gradS^T M_u target.
LfOptimum solve_lf_optimum(const ObjectiveSpec& spec, const LinearForwardModel& model);

}  // namespace postopt

#include "postopt/control.hpp"

#include "postopt/errors.hpp"

namespace postopt {

double objective(const ObjectiveSpec& spec, const StateVector& u, const ControlVector& z) {
    if (u.size() != spec.target.size() || z.size() != spec.M_z.rows()) {
        throw std::invalid_argument("objective: dimension mismatch");
    }
    const Vector misfit = u - spec.target;
    return 0.5 * misfit.dot(spec.M_u * misfit) + 0.5 * spec.beta * z.dot(spec.M_z * z);
}

ControlVector gradient(const ObjectiveSpec& spec, const LinearForwardModel& model,
                       const ControlVector& z) {
    if (z.size() != spec.M_z.rows()) {
        throw std::invalid_argument("gradient: dimension mismatch");
    }
    const StateVector u = model.jacobian_apply(z);
    return model.jacobian_adjoint_apply(spec.M_u * (u - spec.target)) + spec.beta * (spec.M_z * z);
}

ControlVector hessian_apply(const ObjectiveSpec& spec, const LinearForwardModel& model,
                            const ControlVector& w) {
    return model.jacobian_adjoint_apply(spec.M_u * model.jacobian_apply(w)) +
           spec.beta * (spec.M_z * w);
}

ReducedHessian::ReducedHessian(const ObjectiveSpec& spec, const LinearForwardModel& model) {
    const int n = model.control_dim();
    dense_.resize(n, n);
    ControlVector e = ControlVector::Zero(n);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        dense_.col(j) = hessian_apply(spec, model, e);
        e[j] = 0.0;
    }
    // assembled from symmetric quadratic forms; kill the last-bit asymmetry
    dense_ = 0.5 * (dense_ + dense_.transpose()).eval();
    llt_.compute(dense_);
    if (llt_.info() != Eigen::Success) {
        throw AssumptionError("reduced Hessian is not positive definite");
    }
}

ControlVector ReducedHessian::solve(const ControlVector& r) const {
    ControlVector x = llt_.solve(r);
    if ((dense_ * x - r).norm() > 1e-10 * r.norm()) {
        throw SolverError("reduced Hessian solve residual exceeds tolerance");
    }
    return x;
}

LfOptimum solve_lf_optimum(const ObjectiveSpec& spec, const LinearForwardModel& model) {
    if (spec.target.size() != model.state_dim() || spec.M_z.rows() != model.control_dim()) {
        throw std::invalid_argument("solve_lf_optimum: spec and model dimensions differ");
    }
    ReducedHessian hessian(spec, model);
    const ControlVector rhs = model.jacobian_adjoint_apply(spec.M_u * spec.target);
    LfOptimum opt;
    opt.z_tilde = hessian.solve(rhs);
    opt.u_tilde = model.solve(opt.z_tilde);
    opt.gradient_norm = gradient(spec, model, opt.z_tilde).norm();
    opt.objective_value = objective(spec, opt.u_tilde, opt.z_tilde);
    if (opt.gradient_norm > 1e-8 * rhs.norm()) {
        throw SolverError("solve_lf_optimum: first-order optimality not met");
    }
    return opt;
}

}  // namespace postopt

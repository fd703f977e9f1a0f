#include "postopt/update.hpp"

#include "postopt/errors.hpp"

namespace postopt {

ControlVector apply_B_thetabar(const PosteriorMean& pm, const LfOptimum& optimum,
                               const ObjectiveSpec& spec, const LinearForwardModel& lf_model) {
    const int n = lf_model.control_dim();
    const int N = pm.count();
    if (N == 0) {
        return ControlVector::Zero(n);
    }
    if (pm.state_dim != lf_model.state_dim() || pm.z_tilde.size() != n) {
        throw std::invalid_argument("apply_B_thetabar: posterior and model dimensions differ");
    }
    const double inv_alpha = 1.0 / pm.alpha;
    const double zeta2_inv = 1.0 / (pm.zeta * pm.zeta);
    const Vector g_u = spec.M_u * (optimum.u_tilde - spec.target);

    // first block: gradS^T M_u applied to alpha * delta(z~, theta_bar)
    StateVector combined = StateVector::Zero(pm.state_dim);
    for (int l = 0; l < N; ++l) {
        combined += pm.u.col(l);
        for (int i = 0; i < N; ++i) {
            combined -= pm.b(i, l) * pm.spectrum.e_dot_g[i] * pm.u_shift[i].col(l);
        }
    }
    ControlVector result = inv_alpha * lf_model.jacobian_adjoint_apply(spec.M_u * combined);

    for (int l = 0; l < N; ++l) {
        const double weight = inv_alpha * zeta2_inv * g_u.dot(pm.u.col(l));
        result += weight * (spec.M_z * (pm.Z.col(l) - pm.z_tilde));
        for (int i = 0; i < N; ++i) {
            const double shift_weight =
                inv_alpha * zeta2_inv * pm.b(i, l) * g_u.dot(pm.u_shift[i].col(l));
            result -= shift_weight * (spec.M_z * pm.spectrum.w.col(i));
        }
    }
    return result;
}

UpdateResult update_solution(const PosteriorMean& pm, const LfOptimum& optimum,
                             const ObjectiveSpec& spec, const LinearForwardModel& lf_model) {
    UpdateResult res;
    res.z_tilde = optimum.z_tilde;
    res.b_theta = apply_B_thetabar(pm, optimum, spec, lf_model);
    if (pm.count() == 0) {
        res.z_bar = optimum.z_tilde;
    } else {
        ReducedHessian hessian(spec, lf_model);
        const ControlVector step = hessian.solve(res.b_theta);
        res.z_bar = optimum.z_tilde - step;
        const double b_norm = res.b_theta.norm();
        if (b_norm > 0.0 && (hessian.apply(optimum.z_tilde - res.z_bar) - res.b_theta).norm() >
                                1e-9 * b_norm) {
            throw SolverError("update_solution: Newton step residual exceeds tolerance");
        }
    }
    const ControlVector step = res.z_bar - res.z_tilde;
    res.b_theta_norm = res.b_theta.norm();
    res.step_norm_Mz = std::sqrt(step.dot(spec.M_z * step));
    res.objective_lf_at_z_tilde = optimum.objective_value;
    res.objective_lf_at_z_bar = objective(spec, lf_model.solve(res.z_bar), res.z_bar);
    return res;
}

std::vector<ObjectiveRow> hf_objective_report(
    const std::vector<std::pair<std::string, ControlVector>>& candidates,
    const LinearForwardModel& hf_model, const ObjectiveSpec& spec) {
    std::vector<ObjectiveRow> rows;
    rows.reserve(candidates.size());
    for (const auto& [label, z] : candidates) {
        rows.push_back({label, objective(spec, hf_model.solve(z), z)});
    }
    return rows;
}

}  // namespace postopt

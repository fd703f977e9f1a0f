#pragma once

#include <string>
#include <vector>

#include "postopt/calibration.hpp"
#include "postopt/control.hpp"

namespace postopt {

/// Updated optimal control z_bar = z_tilde - H^-1 B theta_bar with diagnostics.
struct UpdateResult {
    ControlVector z_tilde;
    ControlVector b_theta;  // B theta_bar
    ControlVector z_bar;
    double b_theta_norm = 0.0;
    double step_norm_Mz = 0.0;  // |z_bar - z_tilde| in the M_z norm
    double objective_lf_at_z_tilde = 0.0;
    double objective_lf_at_z_bar = 0.0;
};

/// One row of the high-fidelity objective comparison table.
struct ObjectiveRow {
    std::string label;
    double objective = 0.0;
};

/// Contract B theta_bar against the factored posterior mean without forming
/// B in R^{n x p}:
///   1/alpha gradS^T M_u [sum_l (u_l - sum_i b_{i,l} (e^T g_i) u_{i,l})]
///   + 1/alpha sum_l (g_u . u_l) zeta^-2 M_z (z_l - z~)
///   - 1/alpha sum_{l,i} b_{i,l} (g_u . u_{i,l}) zeta^-2 M_z w_i
/// with g_u = M_u (u~ - target) evaluated at the low-fidelity optimum.
ControlVector apply_B_thetabar(const PosteriorMean& pm, const LfOptimum& optimum,
                               const ObjectiveSpec& spec, const LinearForwardModel& lf_model);

/// Newton-style update of the optimal solution through the post-optimality
/// sensitivity operator.
UpdateResult update_solution(const PosteriorMean& pm, const LfOptimum& optimum,
                             const ObjectiveSpec& spec, const LinearForwardModel& lf_model);

/// J(S(z), z) for each labelled candidate, evaluated with the high-fidelity
/// model.
std::vector<ObjectiveRow> hf_objective_report(
    const std::vector<std::pair<std::string, ControlVector>>& candidates,
    const LinearForwardModel& hf_model, const ObjectiveSpec& spec);

}  // namespace postopt

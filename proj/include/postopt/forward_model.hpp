#pragma once

#include <string>

#include <Eigen/LU>

#include "postopt/types.hpp"

namespace postopt {

/// Linear solution operator u = Sys^-1 (C z). The system matrix is factorized
/// once at construction; solves against a constructed model are const and may
/// run concurrently.
///
/// For the benchmark both fidelities live on one mesh, so Sys is square and C
/// is the mesh mass matrix. The coupling matrix may be rectangular (m x n),
/// which the small calibration fixtures use to decouple state and control
/// dimensions.
class LinearForwardModel {
public:
    LinearForwardModel(Matrix system, Matrix coupling, std::string name);

    /// Diffusion operator -kappa u'' = z with Robin coefficient h_robin.
    static LinearForwardModel diffusion(const Mesh1D& mesh, double kappa, double h_robin);

    /// Advection-diffusion operator -kappa u'' + v u' = z, same boundary terms.
    static LinearForwardModel advection_diffusion(const Mesh1D& mesh, double kappa, double v,
                                                  double h_robin);

    /// Solve Sys u = C z. Enforces relative residual <= 1e-10.
    StateVector solve(const ControlVector& z) const;

    /// Apply the solution-operator Jacobian Sys^-1 C.
    StateVector jacobian_apply(const ControlVector& w) const;

    /// Apply its adjoint C^T Sys^-T.
    ControlVector jacobian_adjoint_apply(const StateVector& r) const;

    int state_dim() const { return static_cast<int>(system_.rows()); }
    int control_dim() const { return static_cast<int>(coupling_.cols()); }
    const Matrix& system() const { return system_; }
    const Matrix& coupling() const { return coupling_; }
    const std::string& name() const { return name_; }

private:
    Matrix system_;
    Matrix coupling_;
    std::string name_;
    Eigen::PartialPivLU<Matrix> lu_;
    Eigen::PartialPivLU<Matrix> lu_transpose_;
};

/// Evaluate y_l = hf(z_l) - lf(z_l) for every column of Z. The controllers
/// must be linearly independent (rank of the Gram matrix Z^T Z); a deficient
/// set raises AssumptionError.
DiscrepancyData generate_discrepancy_data(const LinearForwardModel& lf,
                                          const LinearForwardModel& hf, const Matrix& Z);

}  // namespace postopt

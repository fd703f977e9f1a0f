#pragma once

#include "postopt/types.hpp"

namespace postopt::fe {

/// Linear-element mass matrix: tridiagonal with interior diagonal 2h/3,
/// end diagonal h/3, off-diagonal h/6. Exact element integrals, SPD.
SymMatrix assemble_mass(const Mesh1D& mesh);

/// Stiffness for -kappa u'' with Robin boundary terms: (kappa/h) tridiag(-1,2,-1)
/// plus h_robin added to the (0,0) and (n-1,n-1) entries. SPD for h_robin > 0,
/// singular (constant null vector) for h_robin == 0. Rejects kappa <= 0.
SymMatrix assemble_stiffness(const Mesh1D& mesh, double kappa, double h_robin);

/// Advection operator with entries v * int(phi_j' phi_i). Interior rows are
/// (-v/2, 0, +v/2); the one-sided boundary rows are (-v/2, +v/2).
GenMatrix assemble_advection(const Mesh1D& mesh, double v);

}  // namespace postopt::fe

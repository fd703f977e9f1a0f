#pragma once

#include <Eigen/Dense>

namespace postopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Coordinate vectors of controls (length n) and states (length m).
using ControlVector = Vector;
using StateVector = Vector;

/// Uniform mesh of the unit interval.
struct Mesh1D {
    int n_nodes = 0;
    double spacing = 0.0;

    static Mesh1D unit_interval(int n_nodes);

    double node(int i) const { return static_cast<double>(i) * spacing; }
    Vector nodes() const;
};

/// Dense symmetric operator (mass, stiffness). Assembled so that the stored
/// entries satisfy entries == entries.transpose() exactly.
struct SymMatrix {
    int order = 0;
    Matrix entries;
};

/// Dense non-symmetric operator (advection).
struct GenMatrix {
    int order = 0;
    Matrix entries;
};

/// Paired controller/discrepancy observations. Columns of Z are the probed
/// controllers z_l (n x N), columns of Y the matching state discrepancies
/// (m x N). N == 0 is a valid degenerate dataset.
struct DiscrepancyData {
    Matrix Z;
    Matrix Y;

    int count() const { return static_cast<int>(Z.cols()); }
};

}  // namespace postopt

#include "postopt/fe.hpp"

#include <stdexcept>

namespace postopt {

Mesh1D Mesh1D::unit_interval(int n_nodes) {
    if (n_nodes < 2) {
        throw std::invalid_argument("Mesh1D: need at least 2 nodes");
    }
    Mesh1D mesh;
    mesh.n_nodes = n_nodes;
    mesh.spacing = 1.0 / static_cast<double>(n_nodes - 1);
    return mesh;
}

Vector Mesh1D::nodes() const {
    Vector x(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        x[i] = node(i);
    }
    return x;
}

namespace fe {

SymMatrix assemble_mass(const Mesh1D& mesh) {
    const int n = mesh.n_nodes;
    const double h = mesh.spacing;
    Matrix M = Matrix::Zero(n, n);
    for (int e = 0; e + 1 < n; ++e) {
        M(e, e) += h * (2.0 / 6.0);
        M(e + 1, e + 1) += h * (2.0 / 6.0);
        M(e, e + 1) += h / 6.0;
        M(e + 1, e) += h / 6.0;
    }
    return SymMatrix{n, std::move(M)};
}

SymMatrix assemble_stiffness(const Mesh1D& mesh, double kappa, double h_robin) {
    if (kappa <= 0.0) {
        throw std::invalid_argument("assemble_stiffness: kappa must be positive");
    }
    if (h_robin < 0.0) {
        throw std::invalid_argument("assemble_stiffness: h_robin must be nonnegative");
    }
    const int n = mesh.n_nodes;
    const double c = kappa / mesh.spacing;
    Matrix K = Matrix::Zero(n, n);
    for (int e = 0; e + 1 < n; ++e) {
        K(e, e) += c;
        K(e + 1, e + 1) += c;
        K(e, e + 1) -= c;
        K(e + 1, e) -= c;
    }
    K(0, 0) += h_robin;
    K(n - 1, n - 1) += h_robin;
    return SymMatrix{n, std::move(K)};
}

GenMatrix assemble_advection(const Mesh1D& mesh, double v) {
    const int n = mesh.n_nodes;
    Matrix A = Matrix::Zero(n, n);
    // per element: rows are test functions, columns trial derivatives
    for (int e = 0; e + 1 < n; ++e) {
        A(e, e) += -0.5 * v;
        A(e, e + 1) += 0.5 * v;
        A(e + 1, e) += -0.5 * v;
        A(e + 1, e + 1) += 0.5 * v;
    }
    return GenMatrix{n, std::move(A)};
}

}  // namespace fe
}  // namespace postopt

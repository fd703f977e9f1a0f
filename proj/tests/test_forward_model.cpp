#include <doctest.h>

#include "postopt/errors.hpp"
#include "postopt/fe.hpp"
#include "postopt/forward_model.hpp"
#include "postopt/rng.hpp"

using namespace postopt;

namespace {

Vector nodes_of(int n) { return Mesh1D::unit_interval(n).nodes(); }

}  // namespace

TEST_CASE("lf_solve: zero source gives zero state") {
    const auto model = LinearForwardModel::diffusion(Mesh1D::unit_interval(50), 1.0, 2.0);
    CHECK(model.solve(Vector::Zero(50)).norm() == 0.0);
}

TEST_CASE("lf_solve matches the closed-form solution for a constant source") {
    // -u'' = c with u'(0) = 2u(0), -u'(1) = 2u(1) has the exact solution
    // u(x) = c(-x^2/2 + x/2 + 1/4); nodal FE values agree to roundoff.
    const int n = 200;
    const Mesh1D mesh = Mesh1D::unit_interval(n);
    const auto model = LinearForwardModel::diffusion(mesh, 1.0, 2.0);
    const double c = 3.0;
    const Vector u = model.solve(Vector::Constant(n, c));
    double max_err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = mesh.node(i);
        const double exact = c * (-0.5 * x * x + 0.5 * x + 0.25);
        max_err = std::max(max_err, std::abs(u[i] - exact));
    }
    CHECK(max_err <= 1e-3);
}

TEST_CASE("solution operator is linear (superposition)") {
    const int n = 64;
    const auto model = LinearForwardModel::diffusion(Mesh1D::unit_interval(n), 1.0, 2.0);
    NormalStream rng(11);
    const Vector z1 = rng.draw(n);
    const Vector z2 = rng.draw(n);
    const Vector lhs = model.solve(z1 + z2);
    const Vector rhs = model.solve(z1) + model.solve(z2);
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("hf_solve coincides with lf_solve when v = 0") {
    const int n = 80;
    const Mesh1D mesh = Mesh1D::unit_interval(n);
    const auto lf = LinearForwardModel::diffusion(mesh, 1.0, 2.0);
    const auto hf = LinearForwardModel::advection_diffusion(mesh, 1.0, 0.0, 2.0);
    NormalStream rng(4);
    const Vector z = rng.draw(n);
    const Vector ul = lf.solve(z);
    const Vector uh = hf.solve(z);
    CHECK((ul - uh).norm() <= 1e-12 * ul.norm());
}

TEST_CASE("advection skews a symmetric source response to the right") {
    const int n = 200;
    const Mesh1D mesh = Mesh1D::unit_interval(n);
    const auto hf = LinearForwardModel::advection_diffusion(mesh, 1.0, 0.5, 2.0);
    Vector z(n);
    for (int i = 0; i < n; ++i) {
        const double x = mesh.node(i);
        z[i] = std::sin(3.14159265358979323846 * x);
    }
    const Vector u = hf.solve(z);
    int argmax = 0;
    u.maxCoeff(&argmax);
    CHECK(mesh.node(argmax) > 0.5);
}

TEST_CASE("jacobian and adjoint satisfy the inner-product identity") {
    const int n = 48;
    const auto model = LinearForwardModel::diffusion(Mesh1D::unit_interval(n), 1.0, 2.0);
    NormalStream rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector w = rng.draw(n);
        const Vector r = rng.draw(n);
        const double lhs = model.jacobian_apply(w).dot(r);
        const double rhs = w.dot(model.jacobian_adjoint_apply(r));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("jacobian equals the directional difference quotient (linearity)") {
    const int n = 40;
    const auto model = LinearForwardModel::diffusion(Mesh1D::unit_interval(n), 1.0, 2.0);
    NormalStream rng(2);
    const Vector z = rng.draw(n);
    const Vector w = rng.draw(n);
    // step 1 is valid because the model is linear
    const Vector fd = model.solve(z + w) - model.solve(z);
    const Vector jac = model.jacobian_apply(w);
    CHECK((fd - jac).norm() <= 1e-11 * jac.norm());
}

TEST_CASE("jacobian_apply of zero is zero") {
    const auto model = LinearForwardModel::diffusion(Mesh1D::unit_interval(10), 1.0, 2.0);
    CHECK(model.jacobian_apply(Vector::Zero(10)).norm() == 0.0);
}

TEST_CASE("singular system is reported with the operator name") {
    // pure Neumann diffusion (h_robin = 0) is singular
    CHECK_THROWS_AS(LinearForwardModel::diffusion(Mesh1D::unit_interval(20), 1.0, 0.0),
                    SolverError);
    try {
        LinearForwardModel::diffusion(Mesh1D::unit_interval(20), 1.0, 0.0);
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("diffusion") != std::string::npos);
    }
}

TEST_CASE("generate_discrepancy_data: equal models give zero discrepancy") {
    const int n = 30;
    const Mesh1D mesh = Mesh1D::unit_interval(n);
    const auto lf = LinearForwardModel::diffusion(mesh, 1.0, 2.0);
    const auto hf = LinearForwardModel::advection_diffusion(mesh, 1.0, 0.0, 2.0);
    Matrix Z(n, 2);
    NormalStream rng(5);
    Z.col(0) = rng.draw(n);
    Z.col(1) = rng.draw(n);
    const DiscrepancyData data = generate_discrepancy_data(lf, hf, Z);
    CHECK(data.Y.norm() == 0.0);
}

TEST_CASE("generate_discrepancy_data produces distinct nonzero columns on the benchmark") {
    const int n = 60;
    const Mesh1D mesh = Mesh1D::unit_interval(n);
    const auto lf = LinearForwardModel::diffusion(mesh, 1.0, 2.0);
    const auto hf = LinearForwardModel::advection_diffusion(mesh, 1.0, 0.5, 2.0);
    Matrix Z(n, 2);
    Z.col(0) = Vector::Ones(n);
    Z.col(1) = nodes_of(n);
    const DiscrepancyData data = generate_discrepancy_data(lf, hf, Z);
    CHECK(data.Y.col(0).norm() > 0.0);
    CHECK(data.Y.col(1).norm() > 0.0);
    CHECK((data.Y.col(0) - data.Y.col(1)).norm() > 1e-8 * data.Y.col(0).norm());
}

TEST_CASE("duplicated controllers violate the independence assumption") {
    const int n = 25;
    const Mesh1D mesh = Mesh1D::unit_interval(n);
    const auto lf = LinearForwardModel::diffusion(mesh, 1.0, 2.0);
    const auto hf = LinearForwardModel::advection_diffusion(mesh, 1.0, 0.5, 2.0);
    Matrix Z(n, 2);
    Z.col(0) = Vector::Ones(n);
    Z.col(1) = Vector::Ones(n);
    CHECK_THROWS_AS(generate_discrepancy_data(lf, hf, Z), AssumptionError);
}

TEST_CASE("discrepancy is affine in the controller for the benchmark pair") {
    const int n = 50;
    const Mesh1D mesh = Mesh1D::unit_interval(n);
    const auto lf = LinearForwardModel::diffusion(mesh, 1.0, 2.0);
    const auto hf = LinearForwardModel::advection_diffusion(mesh, 1.0, 0.5, 2.0);
    auto discrepancy = [&](const Vector& z) -> Vector { return hf.solve(z) - lf.solve(z); };
    NormalStream rng(3);
    const Vector z1 = rng.draw(n);
    const Vector z2 = rng.draw(n);
    const Vector y0 = discrepancy(Vector::Zero(n));
    const Vector lhs = discrepancy(z1 + z2) - y0;
    const Vector rhs = (discrepancy(z1) - y0) + (discrepancy(z2) - y0);
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

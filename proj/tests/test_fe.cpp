#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "postopt/fe.hpp"
#include "postopt/forward_model.hpp"

using namespace postopt;

TEST_CASE("mass matrix closed-form entries at n=3") {
    const Mesh1D mesh = Mesh1D::unit_interval(3);
    const SymMatrix M = fe::assemble_mass(mesh);
    CHECK(M.entries(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(M.entries(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(M.entries(2, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(M.entries(0, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(M.entries(1, 2) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(M.entries(0, 2) == 0.0);
}

TEST_CASE("mass matrix entries sum to the measure of the interval") {
    for (int n : {2, 7, 200}) {
        const SymMatrix M = fe::assemble_mass(Mesh1D::unit_interval(n));
        CHECK(M.entries.sum() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("mass matrix is exactly symmetric and positive definite at n=200") {
    const SymMatrix M = fe::assemble_mass(Mesh1D::unit_interval(200));
    CHECK((M.entries - M.entries.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(M.entries);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("stiffness closed-form rows at n=3, no Robin term") {
    const SymMatrix K = fe::assemble_stiffness(Mesh1D::unit_interval(3), 1.0, 0.0);
    Matrix expected(3, 3);
    expected << 2, -2, 0, -2, 4, -2, 0, -2, 2;
    CHECK((K.entries - expected).norm() == 0.0);
    CHECK((K.entries - K.entries.transpose()).norm() == 0.0);
}

TEST_CASE("Robin coefficient adds exactly to the corner entries") {
    const Mesh1D mesh = Mesh1D::unit_interval(17);
    const SymMatrix K0 = fe::assemble_stiffness(mesh, 1.0, 0.0);
    const SymMatrix K2 = fe::assemble_stiffness(mesh, 1.0, 2.0);
    Matrix diff = K2.entries - K0.entries;
    CHECK(diff(0, 0) == 2.0);
    CHECK(diff(16, 16) == 2.0);
    diff(0, 0) = 0.0;
    diff(16, 16) = 0.0;
    CHECK(diff.norm() == 0.0);
}

TEST_CASE("pure-Neumann stiffness annihilates constants") {
    const SymMatrix K = fe::assemble_stiffness(Mesh1D::unit_interval(31), 1.3, 0.0);
    const Vector ones = Vector::Ones(31);
    CHECK((K.entries * ones).norm() <= 1e-13 * K.entries.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(K.entries);
    CHECK(std::abs(es.eigenvalues().minCoeff()) <= 1e-12 * es.eigenvalues().maxCoeff());
}

TEST_CASE("stiffness with positive Robin term is SPD (Cholesky succeeds)") {
    const SymMatrix K = fe::assemble_stiffness(Mesh1D::unit_interval(200), 1.0, 2.0);
    Eigen::LLT<Matrix> llt(K.entries);
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("stiffness rejects nonpositive kappa") {
    CHECK_THROWS_AS(fe::assemble_stiffness(Mesh1D::unit_interval(5), 0.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(fe::assemble_stiffness(Mesh1D::unit_interval(5), -1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("advection with v=0 is the zero matrix") {
    const GenMatrix A = fe::assemble_advection(Mesh1D::unit_interval(9), 0.0);
    CHECK(A.entries.norm() == 0.0);
}

TEST_CASE("advection interior rows are (-v/2, 0, +v/2)") {
    const GenMatrix A = fe::assemble_advection(Mesh1D::unit_interval(3), 0.5);
    CHECK(A.entries(1, 0) == -0.25);
    CHECK(A.entries(1, 1) == 0.0);
    CHECK(A.entries(1, 2) == 0.25);
    // one-sided boundary rows
    CHECK(A.entries(0, 0) == -0.25);
    CHECK(A.entries(0, 1) == 0.25);
    CHECK(A.entries(2, 1) == -0.25);
    CHECK(A.entries(2, 2) == 0.25);
}

TEST_CASE("advection diagonal vanishes on interior nodes for any v") {
    const GenMatrix A = fe::assemble_advection(Mesh1D::unit_interval(41), 3.7);
    for (int i = 1; i < 40; ++i) {
        CHECK(A.entries(i, i) == 0.0);
    }
}

TEST_CASE("refinement consistency: diffusion solutions converge at O(h^2)") {
    // L2 distance between the piecewise-linear solutions on meshes h and h/2;
    // the ratio across two refinement levels should be about 4.
    auto solve_nodes = [](int n) {
        const Mesh1D mesh = Mesh1D::unit_interval(n);
        const LinearForwardModel model = LinearForwardModel::diffusion(mesh, 1.0, 2.0);
        return std::pair{mesh, model.solve(Vector::Ones(n))};
    };
    auto l2_diff = [](const Mesh1D& coarse, const Vector& uc, const Mesh1D& fine,
                      const Vector& uf) {
        // fine nodes contain the coarse nodes; interpolate uc onto the fine
        // mesh, then integrate the squared difference exactly per element
        const int nf = fine.n_nodes;
        Vector diff(nf);
        for (int i = 0; i < nf; ++i) {
            const double x = fine.node(i);
            const int j = std::min(coarse.n_nodes - 2,
                                   static_cast<int>(x / coarse.spacing));
            const double t = (x - coarse.node(j)) / coarse.spacing;
            diff[i] = (1.0 - t) * uc[j] + t * uc[j + 1] - uf[i];
        }
        double acc = 0.0;
        for (int e = 0; e + 1 < nf; ++e) {
            const double a = diff[e];
            const double b = diff[e + 1];
            acc += fine.spacing / 3.0 * (a * a + a * b + b * b);
        }
        return std::sqrt(acc);
    };

    const auto [m1, u1] = solve_nodes(50);
    const auto [m2, u2] = solve_nodes(99);
    const auto [m3, u3] = solve_nodes(197);
    const double d1 = l2_diff(m1, u1, m2, u2);
    const double d2 = l2_diff(m2, u2, m3, u3);
    const double ratio = d1 / d2;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

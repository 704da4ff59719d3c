#include <quarterwave/fd_oracle.hpp>
#include <quarterwave/resolvent.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace quarterwave;

namespace {

double bump(double t) { return std::fabs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

} // namespace

TEST(FdOperator, StiffnessIsExactlySymmetric) {
    const auto op = assemble_fd(BoundaryPotential::table({{0, 1}, {1, 0.4}, {2, 0}}), 8.0, 0.25);
    const Eigen::SparseMatrix<double> t = op.stiffness.transpose();
    EXPECT_EQ((op.stiffness - t).norm(), 0.0);
    const Eigen::SparseMatrix<double> s = op.symmetric.transpose();
    EXPECT_EQ((op.symmetric - s).norm(), 0.0);
}

TEST(FdOperator, ParameterChecks) {
    const auto pot = BoundaryPotential::step(1.0, 1.0);
    EXPECT_THROW(assemble_fd(pot, 8.0, 0.3), ValidationError);
    EXPECT_THROW(assemble_fd(pot, 3.0, 0.1), ValidationError);
    EXPECT_THROW(assemble_fd(pot, 8.0, -0.1), ValidationError);
}

TEST(FdEigen, NeumannDirichletBoxGroundState) {
    // sigma = 0: Neumann at the axes, Dirichlet at X; lowest mode cos(pi x / 2X) in each direction
    const double X = 4.0;
    const double exact = 2.0 * std::pow(std::numbers::pi / (2.0 * X), 2);
    const auto values = lowest_eigenvalues(assemble_fd(BoundaryPotential::step(1.0, 1.0, 0.0), X, 0.05), 3);
    EXPECT_NEAR(values[0], exact, 2e-3 * exact);
    for (double v : values) EXPECT_GE(v, 0.0);
    EXPECT_LE(values[0], values[1]);
    EXPECT_LE(values[1], values[2]);
}

TEST(FdEigen, ConstantRobinApproachesSeparableValue) {
    const auto sigma = [](double) { return 1.0; };
    std::vector<double> err;
    for (double h : {0.2, 0.1, 0.05}) err.push_back(std::fabs(lowest_eigenvalues(assemble_fd_profile(sigma, 8.0, h), 1)[0] + 2.0));
    EXPECT_LT(err[2], 2e-3);
    EXPECT_GE(std::log2(err[0] / err[1]), 1.8);
    EXPECT_GE(std::log2(err[1] / err[2]), 1.8);
}

TEST(FdEigen, StableUnderLargerBox) {
    const auto pot = BoundaryPotential::step(1.0, 1.0);
    const double a = lowest_eigenvalues(assemble_fd(pot, 16.0, 0.1), 1)[0];
    const double b = lowest_eigenvalues(assemble_fd(pot, 24.0, 0.1), 1)[0];
    EXPECT_LT(std::fabs(a - b), 1e-6);
}

TEST(FdEigen, RejectsZeroCount) {
    EXPECT_THROW(lowest_eigenvalues(assemble_fd(BoundaryPotential::step(1.0, 1.0), 4.0, 0.5), 0), ValidationError);
}

TEST(FdResolvent, ZeroSourceGivesZero) {
    const auto op = assemble_fd(BoundaryPotential::step(1.0, 1.0), 4.0, 0.1);
    const SampledField u = fd_resolvent_solve(op, -1.0, SampledField(0.1, 5, 5));
    for (const auto& v : u.values) EXPECT_EQ(v, cplx(0.0));
}

TEST(FdResolvent, SatisfiesTheLinearSystem) {
    const double h = 0.1;
    const auto op = assemble_fd(BoundaryPotential::step(1.0, 1.0), 8.0, h);
    const auto f = SampledField::from_function(h, 31, 31, [](double a, double b) -> cplx { return bump(std::hypot(a - 2, b - 2)); });
    const cplx z(-1.0, 0.3);
    const SampledField u = fd_resolvent_solve(op, z, f);
    Eigen::VectorXcd uv(Eigen::Index(op.size())), rhs = Eigen::VectorXcd::Zero(Eigen::Index(op.size()));
    for (std::size_t j = 0; j < op.n; ++j)
        for (std::size_t i = 0; i < op.n; ++i) {
            const auto r = Eigen::Index(op.index(i, j));
            uv(r) = u.at(i, j);
            if (i < f.nx && j < f.ny) rhs(r) = op.mass(r) * f.at(i, j);
        }
    const Eigen::VectorXcd res = op.stiffness.cast<cplx>() * uv - z * (op.mass.cast<cplx>().asDiagonal() * uv) - rhs;
    EXPECT_LE(res.norm(), 1e-10 * rhs.norm());
}

TEST(FdResolvent, FreeCaseMatchesImageQuadrature) {
    const double h = 0.1;
    const auto pot = BoundaryPotential::step(1.0, 1.0, 0.0);
    const auto f = SampledField::from_function(h, 31, 31, [](double a, double b) -> cplx { return bump(std::hypot(a - 2, b - 2)); });
    const SampledField fd = fd_resolvent_solve(assemble_fd(pot, 12.0, h), -1.0, f);
    const SampledField bie = apply_free_resolvent_on_grid(-1.0, f, 61, 61);
    double diff = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < 61; ++j)
        for (std::size_t i = 0; i < 61; ++i) {
            diff += std::norm(fd.at(i, j) - bie.at(i, j));
            norm += std::norm(fd.at(i, j));
        }
    EXPECT_LE(std::sqrt(diff / norm), 1e-2);
}

TEST(FdResolvent, FieldMustMatchSpacing) {
    const auto op = assemble_fd(BoundaryPotential::step(1.0, 1.0), 4.0, 0.1);
    EXPECT_THROW(fd_resolvent_solve(op, -1.0, SampledField(0.2, 3, 3)), ValidationError);
    EXPECT_THROW(fd_resolvent_solve(op, -1.0, SampledField(0.1, 50, 3)), ValidationError);
}

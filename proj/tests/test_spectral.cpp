#include <quarterwave/fd_oracle.hpp>
#include <quarterwave/spectral.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace quarterwave;

namespace {

const BoundaryPotential step = BoundaryPotential::step(1.0, 1.0);

double fd_kappa_squared(const BoundaryPotential& pot) {
    const double coarse = lowest_eigenvalues(assemble_fd(pot, 16.0, 0.1), 1)[0];
    const double fine = lowest_eigenvalues(assemble_fd(pot, 16.0, 0.05), 1)[0];
    return -(4.0 * fine - coarse) / 3.0;
}

} // namespace

TEST(BoundStates, NoneWithoutCoupling) {
    EXPECT_TRUE(find_bound_states(step.with_alpha(0.0), 0.01, 3.0).empty());
}

TEST(BoundStates, StepMatchesFiniteDifferenceOracle) {
    const auto states = find_bound_states(step, 0.01, 3.0);
    ASSERT_EQ(states.size(), 1u);
    const BoundState& s = states[0];
    EXPECT_EQ(s.energy, -s.kappa * s.kappa);
    EXPECT_FALSE(s.history.empty());
    EXPECT_LT(s.smin_at_root, 1e-8);
    const double k2 = s.kappa * s.kappa;
    EXPECT_LT(std::fabs(k2 - fd_kappa_squared(step)) / k2, 1e-3);
}

TEST(BoundStates, SignedSminChangesSignAtTheRoot) {
    const auto grid = build_grid(step);
    const double kappa = find_bound_states(step, 0.5, 2.0)[0].kappa;
    EXPECT_LT(signed_smin(grid, step, kappa - 0.05) * signed_smin(grid, step, kappa + 0.05), 0.0);
}

TEST(BoundStates, SolveAtRootIsNearSingular) {
    const double kappa = find_bound_states(step, 0.5, 2.0)[0].kappa;
    const auto grid = build_grid(step);
    const auto m = assemble(Wavenumber::imaginary(kappa), grid, step);
    EXPECT_THROW(m.solve(Eigen::VectorXcd::Ones(Eigen::Index(grid.total()))), NearSingularError);
}

TEST(BoundStates, StableUnderGridDoubling) {
    BoundStateOptions fine;
    fine.grid.panels_per_axis = 24;
    const double a = find_bound_states(step, 0.5, 2.0)[0].kappa;
    const double b = find_bound_states(step, 0.5, 2.0, fine)[0].kappa;
    EXPECT_LT(std::fabs(a - b) / b, 1e-3);
}

TEST(BoundStates, MonotoneInCoupling) {
    double previous = 0.0;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const auto states = find_bound_states(step.with_alpha(alpha), 0.01, 5.0);
        ASSERT_FALSE(states.empty()) << alpha;
        EXPECT_GE(states.back().kappa, previous);
        previous = states.back().kappa;
    }
}

TEST(BoundStates, RejectsBadRange) {
    EXPECT_THROW(find_bound_states(step, 0.0, 1.0), ValidationError);
    EXPECT_THROW(find_bound_states(step, 2.0, 1.0), ValidationError);
}

TEST(AxisScan, StepHasNoFlags) {
    const AxisScan s = scan_positive_axis(step, 0.1, 10.0, 40);
    EXPECT_TRUE(s.flagged.empty());
    ASSERT_EQ(s.k.size(), 40u);
    for (std::size_t i = 0; i < s.k.size(); ++i) {
        EXPECT_GT(s.smin[i], 1e-3);
        if (i > 0) { EXPECT_GT(s.k[i], s.k[i - 1]); }
    }
}

TEST(AxisScan, FreeCaseIsOne) {
    const AxisScan s = scan_positive_axis(step.with_alpha(0.0), 0.5, 2.0, 5);
    for (double v : s.smin) EXPECT_EQ(v, 1.0);
}

TEST(ProjectionKernel, DegenerateIntervalIsZero) {
    EXPECT_EQ(free_projection_kernel(0.7, 0.7, {1, 1}, {2, 3}), 0.0);
    EXPECT_THROW(free_projection_kernel(1.0, 0.5, {1, 1}, {1, 1}), ValidationError);
}

TEST(ProjectionKernel, DiagonalFarFromTheAxes) {
    // the image terms die out and the free-plane density (l2 - l1)/(4 pi) remains
    const double v = free_projection_kernel(0.5, 2.0, {400, 500}, {400, 500});
    EXPECT_NEAR(v, 1.5 / (4.0 * std::numbers::pi), 1e-4);
}

TEST(ProjectionKernel, MatchesNeumannBoxModes) {
    // cosine eigenbasis of the Neumann Laplacian on [0, P]^2 with eigenvalues in [0, 1]
    const double P = 400.0;
    const PlanePoint x{0.5, 0.7}, y{1.1, 0.3};
    auto phi = [&](int j, double t) {
        return j == 0 ? 1.0 / std::sqrt(P) : std::sqrt(2.0 / P) * std::cos(j * std::numbers::pi * t / P);
    };
    const int M = int(P / std::numbers::pi) + 2;
    double sxx = 0.0, sxy = 0.0;
    for (int m = 0; m <= M; ++m)
        for (int n = 0; n <= M; ++n) {
            const double lam = std::pow(m * std::numbers::pi / P, 2) + std::pow(n * std::numbers::pi / P, 2);
            if (lam > 1.0) continue;
            const double ax = phi(m, x.x1) * phi(n, x.x2);
            sxx += ax * ax;
            sxy += ax * phi(m, y.x1) * phi(n, y.x2);
        }
    const double exx = free_projection_kernel(0.0, 1.0, x, x);
    EXPECT_LT(std::fabs(sxx - exx) / exx, 1e-3);
    EXPECT_LT(std::fabs(sxy - free_projection_kernel(0.0, 1.0, x, y)) / exx, 1e-3);
}

TEST(ProjectionKernel, BoundedByDiagonal) {
    const PlanePoint x{0.8, 1.2};
    const double diag = free_projection_kernel(0.0, 1.0, x, x);
    for (double d = 0.5; d < 40.0; d *= 1.4)
        EXPECT_LE(std::fabs(free_projection_kernel(0.0, 1.0, x, {x.x1 + d, x.x2 + 0.3 * d})), diag);
}

TEST(ProjectionKernel, Idempotent) {
    // (E E)(x, y) by midpoint quadrature over [0, 60]^2
    const double R = 60.0, s = 0.3;
    const int n = int(R / s);
    for (auto [x, y] : {std::pair{PlanePoint{1, 1}, PlanePoint{1, 1}}, std::pair{PlanePoint{1, 1}, PlanePoint{2, 0.5}}}) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const PlanePoint z{(i + 0.5) * s, (j + 0.5) * s};
                acc += free_projection_kernel(0.0, 1.0, x, z) * free_projection_kernel(0.0, 1.0, z, y);
            }
        acc *= s * s;
        EXPECT_LE(std::fabs(acc - free_projection_kernel(0.0, 1.0, x, y)), 5e-2 * free_projection_kernel(0.0, 1.0, x, x));
    }
}

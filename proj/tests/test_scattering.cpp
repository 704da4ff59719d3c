#include <quarterwave/scattering.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace quarterwave;

namespace {

const BoundaryPotential step = BoundaryPotential::step(1.0, 1.0);
const double pi = std::numbers::pi;

} // namespace

TEST(PlaneWave, SymmetrizedValues) {
    const IncomingWave wave(2.0, 0.6, 0.8);
    EXPECT_EQ(sym_plane_wave(wave, {0.0, 0.0}), cplx(4.0));
    EXPECT_NEAR(std::abs(sym_plane_wave(wave, {0.7, 0.0}) - 4.0 * std::cos(1.2 * 0.7)), 0.0, 1e-15);
    cplx four(0.0);
    const PlanePoint x{0.4, 1.9};
    for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) four += std::exp(cplx(0.0, s1 * wave.k1() * x.x1 + s2 * wave.k2() * x.x2));
    EXPECT_LT(std::abs(sym_plane_wave(wave, x) - four), 1e-14);
}

TEST(PlaneWave, Validation) {
    EXPECT_THROW(IncomingWave(0.0, 1.0, 0.0), ValidationError);
    EXPECT_THROW(IncomingWave(1.0, 1.0, 1.0), ValidationError);
    EXPECT_THROW(OutgoingDirection::from_degrees(0.0), std::domain_error);
    EXPECT_THROW(OutgoingDirection::from_degrees(90.0), std::domain_error);
    EXPECT_THROW(OutgoingDirection::from_degrees(120.0), ValidationError);
}

TEST(BoundaryRhs, NodeFormula) {
    const auto grid = build_grid(step);
    const IncomingWave wave(2.0, 1.0, 0.0);
    const Eigen::VectorXcd rhs = boundary_rhs(wave, step, grid);
    for (std::size_t j = 0; j < grid.per_axis(); ++j) {
        const double y = grid.nodes[j];
        const double inside = step(y) != 0.0 ? 1.0 : 0.0;
        EXPECT_NEAR(rhs(Eigen::Index(j)).real(), inside * 4.0 * std::cos(2.0 * y), 1e-15);
        EXPECT_EQ(rhs(Eigen::Index(j + grid.per_axis())), cplx(inside * 4.0));
    }
    EXPECT_NEAR(boundary_rhs(IncomingWave(2.0, 1.0, 0.0), step, grid)(0).real(), 4.0 * std::cos(2.0 * grid.nodes[0]), 1e-15);
    EXPECT_TRUE(boundary_rhs(wave, step.with_alpha(0.0), grid).isZero(0.0));
    const auto table = BoundaryPotential::table({{0, 1}, {0.5, 0}, {1, 0}, {1.2, 2}});
    const auto tgrid = build_grid(table, 4, 4);
    const Eigen::VectorXcd trhs = boundary_rhs(wave, table, tgrid);
    for (std::size_t j = 0; j < tgrid.per_axis(); ++j)
        if (table(tgrid.nodes[j]) == 0.0) { EXPECT_EQ(trhs(Eigen::Index(j)), cplx(0.0)); }
}

TEST(Eigenfunction, FreeCaseIsPlaneWave) {
    const IncomingWave wave = IncomingWave::from_degrees(1.7, 20.0);
    const GeneralizedEigenfunction psi(wave, step.with_alpha(0.0));
    for (PlanePoint x : {PlanePoint{0, 0}, PlanePoint{0.3, 4.0}}) EXPECT_EQ(psi(x), sym_plane_wave(wave, x));
    EXPECT_EQ(scattering_amplitude(wave, OutgoingDirection::from_degrees(30.0), step.with_alpha(0.0)).f, cplx(0.0));
}

TEST(Eigenfunction, ResidualOrders) {
    const IncomingWave wave = IncomingWave::from_degrees(1.0, 45.0);
    const GeneralizedEigenfunction psi(wave, step);
    std::vector<double> pde, robin;
    const PlanePoint x{0.6, 0.4};
    for (double H : {0.2, 0.1, 0.05}) {
        const cplx c = psi(x);
        const cplx lap = (psi({x.x1 + H, x.x2}) + psi({x.x1 - H, x.x2}) + psi({x.x1, x.x2 + H}) + psi({x.x1, x.x2 - H}) - 4.0 * c) / (H * H);
        pde.push_back(std::abs(lap + c) / std::abs(c));
        const cplx u0 = psi({0.5, 0.0});
        robin.push_back(std::abs((psi({0.5, H / 2}) - u0) / (H / 2) + step(0.5) * u0) / std::abs(u0));
    }
    EXPECT_GE(std::log2(pde[1] / pde[2]), 1.8);
    EXPECT_GE(std::log2(robin[1] / robin[2]), 0.8);
}

TEST(Amplitude, FarFieldConsistency) {
    const IncomingWave wave = IncomingWave::from_degrees(1.0, 45.0);
    const OutgoingDirection out = OutgoingDirection::from_degrees(60.0);
    const GeneralizedEigenfunction psi(wave, step);
    const cplx f = psi.amplitude(out);
    std::vector<cplx> ray;
    for (double r : {20.0, 40.0, 80.0})
        ray.push_back(std::sqrt(r) * std::exp(cplx(0.0, -r)) * psi.scattered({r * out.omega1, r * out.omega2}));
    EXPECT_LT(std::abs(ray[2] - ray[1]) / std::abs(f), 0.05);
    EXPECT_LT(std::abs(ray[2] - f), std::abs(ray[1] - f));
    EXPECT_LT(std::abs(ray[2] - f) / std::abs(f), 0.01);
}

TEST(Amplitude, ConvergedUnderGridDoubling) {
    const IncomingWave wave = IncomingWave::from_degrees(1.0, 45.0);
    const OutgoingDirection out = OutgoingDirection::from_degrees(60.0);
    GridOptions fine;
    fine.panels_per_axis = 24;
    const cplx a = scattering_amplitude(wave, out, step).f;
    const cplx b = scattering_amplitude(wave, out, step, fine).f;
    EXPECT_LT(std::abs(a - b), 1e-6);
}

TEST(Amplitude, AxisSwapCovariance) {
    const double k = 1.4;
    const cplx a = scattering_amplitude(IncomingWave::from_degrees(k, 25.0), OutgoingDirection::from_degrees(70.0), step).f;
    const cplx b = scattering_amplitude(IncomingWave::from_degrees(k, 65.0), OutgoingDirection::from_degrees(20.0), step).f;
    EXPECT_LT(std::abs(a - b), 1e-10 * std::abs(a));
}

TEST(Amplitude, WeakCouplingIsSecondOrder) {
    const IncomingWave wave = IncomingWave::from_degrees(1.0, 45.0);
    const OutgoingDirection out = OutgoingDirection::from_degrees(60.0);
    std::vector<double> ratio;
    for (double alpha : {1e-2, 5e-3}) {
        const auto pot = step.with_alpha(alpha);
        ratio.push_back(std::abs(scattering_amplitude(wave, out, pot).f - weak_coupling_amplitude(wave, out, pot, alpha).f) /
                        (alpha * alpha));
    }
    EXPECT_LT(std::fabs(ratio[0] - ratio[1]) / ratio[1], 0.25);
}

TEST(SigmaHat, StepExamples) {
    EXPECT_LT(std::abs(sigma_hat_step(1.0, pi, 1.0, 1.0)), 1e-15);
    const cplx expected = -(8.0 / pi) * std::sqrt(cplx(0.0, 1.0 / (2.0 * pi)));
    EXPECT_LT(std::abs(sigma_hat_step(1.0, pi / 2, 1.0, 1.0) - expected), 1e-15);
    EXPECT_LT(std::abs(sigma_hat(1.0, pi / 2, step) - expected), 1e-13);
    const cplx at_zero = -4.0 * std::sqrt(cplx(0.0, 1.0 / (2.0 * pi * 3.0)));
    EXPECT_LT(std::abs(sigma_hat_step(3.0, 0.0, 1.0, 1.0) - at_zero), 1e-15);
    EXPECT_LT(std::abs(sigma_hat_step(3.0, 1e-7, 1.0, 1.0) - at_zero), 1e-13);
}

TEST(SigmaHat, QuadratureMatchesClosedForm) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> kd(0.05, 10.0), xd(-20.0, 20.0);
    for (int i = 0; i < 50; ++i) {
        const double k = kd(rng), xi = xd(rng);
        const cplx exact = sigma_hat_step(k, xi, 1.0, 1.0);
        EXPECT_LT(std::abs(sigma_hat(k, xi, step) - exact), 1e-10 * std::max(1.0, std::abs(exact)));
    }
}

TEST(SigmaHat, ExponentialClosedForm) {
    // int_0^inf e^{-mu y} cos(xi y) dy = mu / (mu^2 + xi^2)
    const auto pot = BoundaryPotential::exponential(1.0, 2.0);
    for (double xi : {0.0, 1.0, 7.5}) {
        const cplx expected = -4.0 * std::sqrt(cplx(0.0, 1.0 / (2.0 * pi))) * (2.0 / (4.0 + xi * xi));
        EXPECT_LT(std::abs(sigma_hat(1.0, xi, pot) - expected), 1e-12);
    }
}

TEST(WeakCoupling, PairsOfEvenTerms) {
    // sigma_hat is even, so the four-term sum over (+-k'_j +- k_j) is twice the two-term sum
    const IncomingWave wave = IncomingWave::from_degrees(1.3, 30.0);
    const OutgoingDirection out = OutgoingDirection::from_degrees(50.0);
    const double alpha = 0.2;
    const double kj[2] = {wave.k1(), wave.k2()};
    const double kp[2] = {wave.k * out.omega1, wave.k * out.omega2};
    cplx four(0.0);
    for (int j = 0; j < 2; ++j)
        four += sigma_hat(wave.k, kp[j] + kj[j], step) + sigma_hat(wave.k, kp[j] - kj[j], step) +
                sigma_hat(wave.k, kj[j] - kp[j], step) + sigma_hat(wave.k, -kj[j] - kp[j], step);
    EXPECT_LT(std::abs(weak_coupling_amplitude(wave, out, step, alpha).f + 0.5 * alpha * four), 1e-14);
    EXPECT_EQ(weak_coupling_amplitude(wave, out, step, 0.0).f, cplx(0.0));
}

TEST(WeakCoupling, DiagonalClosedForm) {
    // w = w' = 45 degrees: terms at xi = 2 k / sqrt 2 and xi = 0 on both axes
    const double k = 1.0;
    const IncomingWave wave = IncomingWave::from_degrees(k, 45.0);
    const OutgoingDirection out = OutgoingDirection::from_degrees(45.0);
    const double xi = 2.0 * k / std::sqrt(2.0);
    const cplx pref = std::sqrt(cplx(0.0, 1.0 / (2.0 * pi * k)));
    const cplx expected = -2.0 * (-4.0 * pref * std::sin(xi) / xi - 4.0 * pref);
    EXPECT_LT(std::abs(weak_coupling_amplitude(wave, out, step, 1.0).f - expected), 1e-12);
}

TEST(WeakCoupling, LowEnergyConstant) {
    EXPECT_NEAR(low_energy_constant(step), 128.0 / pi, 1e-6);
    EXPECT_NEAR(low_energy_constant(BoundaryPotential::step(2.0, 0.5)), 128.0 / pi, 1e-6);
}

#include <quarterwave/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using namespace quarterwave;

namespace {

constexpr double inv2pi = 1.0 / (2.0 * std::numbers::pi);

double g_imag(double kappa, double r) { return inv2pi * std::cyl_bessel_k(0.0, kappa * r); }

cplx g_real(double k, double r) {
    const cplx h0(std::cyl_bessel_j(0.0, k * r), std::cyl_neumann(0.0, k * r));
    return inv2pi * cplx(0.0, std::numbers::pi / 2.0) * h0;
}

} // namespace

TEST(Wavenumber, Construction) {
    EXPECT_THROW(Wavenumber(cplx(1.0, -0.1)), ValidationError);
    EXPECT_THROW(Wavenumber(cplx(0.0)), ValidationError);
    const auto k = Wavenumber::from_energy(-4.0);
    EXPECT_NEAR(std::abs(k.value() - cplx(0.0, 2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(k.energy() + 4.0), 0.0, 1e-14);
    EXPECT_TRUE(Wavenumber::real_axis(1.5).on_real_axis());
    EXPECT_THROW(Wavenumber::from_energy(2.0), ValidationError);
    const auto kz = Wavenumber::from_energy(cplx(3.0, 0.5));
    EXPECT_GT(kz.value().imag(), 0.0);
    EXPECT_NEAR(std::abs(kz.energy() - cplx(3.0, 0.5)), 0.0, 1e-14);
}

TEST(GreenFree, ImaginaryWavenumberAtOne) {
    // K0(1) = 0.42102443824070834
    EXPECT_NEAR(green_free(Wavenumber::imaginary(1.0), 1.0).real(), 0.42102443824070834 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(green_free(Wavenumber::imaginary(1.0), 1.0).imag(), 0.0, 1e-16);
}

TEST(GreenFree, ExponentialBoundAtTen) {
    const double bound = inv2pi * std::sqrt(std::numbers::pi / 20.0) * std::exp(-10.0) * 1.01;
    EXPECT_LE(std::abs(green_free(Wavenumber::imaginary(1.0), 10.0)), bound);
}

TEST(GreenFree, RealAxisIsOutgoingHankel) {
    for (double r : {0.1, 0.5, 1.0, 3.7, 12.0}) {
        const cplx v = green_free(Wavenumber::real_axis(2.0), r);
        EXPECT_LT(std::abs(v - g_real(2.0, r)), 1e-12) << r;
    }
}

TEST(GreenFree, SingularAtZero) { EXPECT_THROW(green_free(Wavenumber::imaginary(1.0), 0.0), std::domain_error); }

TEST(GreenFree, DerivativeMatchesDifferenceQuotient) {
    const Wavenumber k(cplx(1.3, 0.4));
    for (double r : {0.2, 1.0, 4.0}) {
        const double d = 1e-6;
        const cplx fd = (green_free(k, r + d) - green_free(k, r - d)) / (2.0 * d);
        EXPECT_LT(std::abs(green_free_with_derivative(k, r).second - fd), 1e-8) << r;
    }
}

TEST(GreenImages, BruteForceFourTerms) {
    const double r1 = std::hypot(2.0, 2.0), r2 = std::hypot(4.0, 2.0), r3 = std::hypot(2.0, 6.0), r4 = std::hypot(4.0, 6.0);
    const double expected = g_imag(1.0, r1) + g_imag(1.0, r2) + g_imag(1.0, r3) + g_imag(1.0, r4);
    EXPECT_NEAR(green_images(Wavenumber::imaginary(1.0), {1, 2}, {3, 4}).real(), expected, 1e-13);
}

TEST(GreenImages, SymmetricInArguments) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    const Wavenumber k(cplx(0.8, 0.3));
    for (int i = 0; i < 100; ++i) {
        const PlanePoint x{u(rng), u(rng)}, y{u(rng), u(rng)};
        EXPECT_EQ(green_images(k, x, y), green_images(k, y, x));
    }
}

TEST(GreenImages, CoincidenceRules) {
    const Wavenumber k = Wavenumber::real_axis(1.7);
    const PlanePoint x{1.0, 1.0};
    const double y1 = 0.4;
    const cplx same = 2.0 * green_free(k, std::hypot(x.x1 - y1, x.x2)) + 2.0 * green_free(k, std::hypot(x.x1 + y1, x.x2));
    EXPECT_LT(std::abs(green_images(k, x, {y1, 0.0}) - same), 1e-14);

    const BoundaryPoint a{Axis::horizontal, 0.3}, b{Axis::horizontal, 1.1}, c{Axis::vertical, 0.8};
    EXPECT_LT(std::abs(green_boundary(k, a, b) - green_images(k, a.embed(), b.embed())), 1e-14);
    EXPECT_LT(std::abs(green_boundary(k, a, c) - 4.0 * green_free(k, std::hypot(0.3, 0.8))), 1e-14);
    EXPECT_LT(std::abs(green_boundary(k, a, c) - green_images(k, a.embed(), c.embed())), 1e-14);
}

TEST(GreenImages, SingularAtImages) {
    EXPECT_THROW(green_images(Wavenumber::imaginary(1.0), {1, 2}, {1, 2}), std::domain_error);
    EXPECT_THROW(green_images(Wavenumber::imaginary(1.0), {0, 2}, {0, 2}), std::domain_error);
}

TEST(GreenImages, ExponentialTail) {
    // log|G0| against separation has slope close to -kappa
    const double kappa = 1.5;
    std::vector<double> d, v;
    for (double s = 1.0; s < 30.0; s *= 1.3) {
        d.push_back(s);
        v.push_back(std::log(std::abs(green_images(Wavenumber::imaginary(kappa), {1.0 + s, 1.0}, {1.0, 1.0}))));
    }
    const double slope = (v.back() - v[v.size() - 2]) / (d.back() - d[d.size() - 2]);
    EXPECT_NEAR(slope, -kappa, 0.05);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_LE(v[i] + kappa * d[i], v[0] + kappa * d[0] + 1e-12);
}

TEST(GreenImages, GradientMatchesDifferences) {
    const Wavenumber k(cplx(1.0, 0.5));
    const PlanePoint x{0.7, 1.3}, y{2.0, 0.4};
    const double h = 1e-6;
    const auto g = green_images_gradient(k, x, y);
    const cplx d1 = (green_images(k, {x.x1 + h, x.x2}, y) - green_images(k, {x.x1 - h, x.x2}, y)) / (2 * h);
    const cplx d2 = (green_images(k, {x.x1, x.x2 + h}, y) - green_images(k, {x.x1, x.x2 - h}, y)) / (2 * h);
    EXPECT_LT(std::abs(g[0] - d1), 1e-8);
    EXPECT_LT(std::abs(g[1] - d2), 1e-8);
}

TEST(KernelEntry, ZeroCoupling) {
    const auto pot = BoundaryPotential::step(1.0, 1.0, 0.0);
    const Wavenumber k = Wavenumber::imaginary(1.0);
    const BoundaryPoint b{Axis::horizontal, 0.5};
    EXPECT_EQ(kernel_entry(k, KernelVariant::B0, b, PlanePoint{1, 1}, pot), cplx(0.0));
    EXPECT_EQ(kernel_entry(k, KernelVariant::B1star, PlanePoint{1, 1}, b, pot), cplx(0.0));
    EXPECT_EQ(kernel_entry(k, KernelVariant::B, b, BoundaryPoint{Axis::vertical, 0.2}, pot), cplx(0.0));
}

TEST(KernelEntry, StepBKernelValue) {
    const auto pot = BoundaryPotential::step(1.0, 1.0);
    const cplx v = kernel_entry(Wavenumber::imaginary(1.0), KernelVariant::B, BoundaryPoint{Axis::horizontal, 0.25},
                                BoundaryPoint{Axis::horizontal, 0.5}, pot);
    EXPECT_NEAR(v.real(), -(2.0 * g_imag(1.0, 0.25) + 2.0 * g_imag(1.0, 0.75)), 1e-13);
    EXPECT_LT(v.real(), 0.0);
}

TEST(KernelEntry, SignBookkeeping) {
    const auto pot = BoundaryPotential::table({{0, -4}, {1, -4}, {2, 9}, {3, 9}});
    const Wavenumber k = Wavenumber::imaginary(1.0);
    const BoundaryPoint neg{Axis::horizontal, 0.5}, pos{Axis::vertical, 2.5};
    const cplx g = green_boundary(k, neg, pos);
    EXPECT_LT(std::abs(kernel_B(k, neg, pos, pot) - (-2.0 * 3.0 * g)), 1e-14);
    EXPECT_LT(std::abs(kernel_B(k, pos, neg, pot) - (3.0 * 2.0 * g)), 1e-14);
    const PlanePoint x{1.0, 1.0};
    EXPECT_LT(std::abs(kernel_B1star(k, x, neg, pot) - 2.0 * green_images(k, x, neg.embed())), 1e-14);
    EXPECT_LT(std::abs(kernel_B0(k, pos, x, pot) - 3.0 * green_images(k, pos.embed(), x)), 1e-14);
}

TEST(KernelEntry, ArgumentKindsAreChecked) {
    const auto pot = BoundaryPotential::step(1.0, 1.0);
    EXPECT_THROW(kernel_entry(Wavenumber::imaginary(1.0), KernelVariant::B, PlanePoint{1, 1},
                              BoundaryPoint{Axis::vertical, 0.2}, pot),
                 ValidationError);
}

#pragma once

// Free Green function of -Delta - k^2 in the plane, its Neumann
// symmetrization on the quarter plane by the method of images, and the
// boundary-layer kernels built from it.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

#include "errors.hpp"
#include "potential.hpp"
#include "specfun.hpp"

namespace quarterwave {

using cplx = std::complex<double>;

/// Spectral parameter k with Im k >= 0, z = k^2. A real k stands for the
/// limiting value k + i0.
class Wavenumber {
public:
    explicit Wavenumber(cplx k) : k_(k) {
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
            throw ValidationError("k must be finite");
        if (k.imag() < 0.0) throw ValidationError("k must satisfy Im k >= 0");
        if (k == cplx(0.0)) throw ValidationError("k must be nonzero");
    }

    /// k = i kappa, energy -kappa^2.
    static Wavenumber imaginary(double kappa) {
        if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
        return Wavenumber(cplx(0.0, kappa));
    }

    /// Limiting absorption value k + i0 on the positive axis.
    static Wavenumber real_axis(double k) {
        if (!(k > 0.0)) throw ValidationError("k must be positive");
        return Wavenumber(cplx(k, 0.0));
    }

    /// Branch with Im k > 0 for z off [0, inf).
    static Wavenumber from_energy(cplx z) {
        if (z.imag() == 0.0 && z.real() >= 0.0)
            throw ValidationError("z must lie off the half-line [0, inf)");
        return Wavenumber(cplx(0.0, 1.0) * std::sqrt(-z));
    }

    cplx value() const noexcept { return k_; }
    cplx energy() const noexcept { return k_ * k_; }
    bool on_real_axis() const noexcept { return k_.imag() == 0.0; }
    /// Argument of K0 per unit distance: w = -i k r.
    cplx bessel_scale() const noexcept { return cplx(0.0, -1.0) * k_; }

private:
    cplx k_;
};

enum class Axis { horizontal = 0, vertical = 1 };

struct PlanePoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

struct BoundaryPoint {
    Axis axis = Axis::horizontal;
    double coordinate = 0.0;

    PlanePoint embed() const {
        return axis == Axis::horizontal ? PlanePoint{coordinate, 0.0} : PlanePoint{0.0, coordinate};
    }
};

/// (1/2pi) K0(-i k r).
inline cplx green_free(const Wavenumber& k, double r) {
    if (!(r > 0.0)) throw std::domain_error("green_free: singular at r = 0");
    return specfun::bessel_K0(k.bessel_scale() * r) / (2.0 * std::numbers::pi);
}

/// Value and radial derivative d/dr of (1/2pi) K0(-i k r).
inline std::pair<cplx, cplx> green_free_with_derivative(const Wavenumber& k, double r) {
    if (!(r > 0.0)) throw std::domain_error("green_free: singular at r = 0");
    const cplx a = k.bessel_scale();
    const auto [k0, k1] = specfun::bessel_K01(a * r);
    constexpr double c = 1.0 / (2.0 * std::numbers::pi);
    return {c * k0, -c * a * k1};
}

/// Sum of green_free over the four images (+-y1, +-y2) of y.
inline cplx green_images(const Wavenumber& k, PlanePoint x, PlanePoint y) {
    cplx total(0.0);
    for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
            const double r = std::hypot(x.x1 - s1 * y.x1, x.x2 - s2 * y.x2);
            if (r == 0.0)
                throw std::domain_error("green_images: x coincides with an image of y");
            total += green_free(k, r);
        }
    }
    return total;
}

/// Gradient in x of green_images.
inline std::array<cplx, 2> green_images_gradient(const Wavenumber& k, PlanePoint x, PlanePoint y) {
    std::array<cplx, 2> g{cplx(0.0), cplx(0.0)};
    for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
            const double d1 = x.x1 - s1 * y.x1, d2 = x.x2 - s2 * y.x2;
            const double r = std::hypot(d1, d2);
            if (r == 0.0)
                throw std::domain_error("green_images: x coincides with an image of y");
            const cplx dg = green_free_with_derivative(k, r).second;
            g[0] += dg * (d1 / r);
            g[1] += dg * (d2 / r);
        }
    }
    return g;
}

/// green_images for two boundary points, using the coincidence rules
/// 2G(|x-y|) + 2G(x+y) on one axis and 4G(sqrt(x^2+y^2)) across axes.
inline cplx green_boundary(const Wavenumber& k, BoundaryPoint x, BoundaryPoint y) {
    if (x.axis == y.axis)
        return 2.0 * green_free(k, std::fabs(x.coordinate - y.coordinate)) +
               2.0 * green_free(k, x.coordinate + y.coordinate);
    return 4.0 * green_free(k, std::hypot(x.coordinate, y.coordinate));
}

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

enum class KernelVariant { B0, B1star, B };

/// B0(k)(x, y) = sqrt|sigma(x)| G0(k)(x, y), x on the boundary, y in the plane.
inline cplx kernel_B0(const Wavenumber& k, BoundaryPoint x, PlanePoint y,
                      const BoundaryPotential& pot) {
    const double s = pot(x.coordinate);
    if (s == 0.0) return 0.0;
    return std::sqrt(std::fabs(s)) * green_images(k, x.embed(), y);
}

/// B1(k)*(x, y) = -sgn sigma(y) sqrt|sigma(y)| G0(k)(x, y), x in the plane, y on the boundary.
inline cplx kernel_B1star(const Wavenumber& k, PlanePoint x, BoundaryPoint y,
                          const BoundaryPotential& pot) {
    const double s = pot(y.coordinate);
    if (s == 0.0) return 0.0;
    return -sign_of(s) * std::sqrt(std::fabs(s)) * green_images(k, x, y.embed());
}

/// B(k)(x, y) = -sqrt|sigma(x)| sgn sigma(y) sqrt|sigma(y)| G0(k)(x, y), both on the boundary.
inline cplx kernel_B(const Wavenumber& k, BoundaryPoint x, BoundaryPoint y,
                     const BoundaryPotential& pot) {
    const double sx = pot(x.coordinate);
    const double sy = pot(y.coordinate);
    if (sx == 0.0 || sy == 0.0) return 0.0;
    return -std::sqrt(std::fabs(sx)) * sign_of(sy) * std::sqrt(std::fabs(sy)) *
           green_boundary(k, x, y);
}

using KernelArgument = std::variant<BoundaryPoint, PlanePoint>;

/// Dispatcher over the three kernels; the argument kinds must match the variant.
inline cplx kernel_entry(const Wavenumber& k, KernelVariant variant, const KernelArgument& x,
                         const KernelArgument& y, const BoundaryPotential& pot) {
    auto as_plane = [](const KernelArgument& a) {
        if (const auto* b = std::get_if<BoundaryPoint>(&a)) return b->embed();
        return std::get<PlanePoint>(a);
    };
    auto need_boundary = [](const KernelArgument& a, const char* which) {
        const auto* b = std::get_if<BoundaryPoint>(&a);
        if (!b) throw ValidationError(std::string("kernel_entry: ") + which + " must be a boundary point");
        return *b;
    };
    switch (variant) {
    case KernelVariant::B0:
        return kernel_B0(k, need_boundary(x, "x"), as_plane(y), pot);
    case KernelVariant::B1star:
        return kernel_B1star(k, as_plane(x), need_boundary(y, "y"), pot);
    case KernelVariant::B:
        return kernel_B(k, need_boundary(x, "x"), need_boundary(y, "y"), pot);
    }
    throw ValidationError("kernel_entry: unknown variant");
}

} // namespace quarterwave

#pragma once

// Order-0/1 Bessel functions used by the free Green function
// (1/2pi) K0(-i k r). Arguments of the form -ikr with Im k >= 0 lie in the
// closed right half-plane, which is where these routines are accurate to
// near machine precision:
//   |w| <= 2            ascending series
//   |w| >  2, Re w >= 0 Temme/Steed continued fraction (CF2)
// Left half-plane arguments fall back to the series and lose digits as |w|
// grows; the kernels never produce them.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace quarterwave::specfun {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = 0.577215664901532860606512090082;
inline constexpr double series_radius = 2.0;
inline constexpr double default_split_radius = 8.0;

namespace detail {

inline void check_argument(cplx w) {
    if (w == cplx(0.0, 0.0))
        throw std::domain_error("bessel_K: logarithmic singularity at w = 0");
    if (w.imag() == 0.0 && w.real() < 0.0)
        throw std::domain_error("bessel_K: argument on the branch cut (negative real axis)");
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
        throw std::domain_error("bessel_K: non-finite argument");
}

/// Ascending series of I0, I1 and the digamma-weighted sums that complete
/// K0 and K1. Converges for all w; cancellation grows like e^{|Re w|}.
struct SeriesTerms {
    cplx i0{0.0};
    cplx i1{0.0};
    cplx k0_tail{0.0}; // sum_m H_m t^m / (m!)^2
    cplx k1_tail{0.0}; // sum_m (psi(m+1)+psi(m+2)) t^m / (m!(m+1)!)
};

inline SeriesTerms series(cplx w) {
    const cplx t = 0.25 * w * w;
    SeriesTerms s;
    cplx term0(1.0); // t^m/(m!)^2
    cplx term1(1.0); // t^m/(m!(m+1)!)
    double harmonic = 0.0;
    for (int m = 0; m < 500; ++m) {
        if (m > 0) {
            term0 *= t / (double(m) * m);
            term1 *= t / (double(m) * (m + 1));
            harmonic += 1.0 / m;
        }
        const double psi_sum = 2.0 * (harmonic - euler_gamma) + 1.0 / (m + 1);
        s.i0 += term0;
        s.i1 += term1;
        s.k0_tail += harmonic * term0;
        s.k1_tail += psi_sum * term1;
        const double scale = std::abs(s.i0) + std::abs(s.k0_tail) + std::abs(s.k1_tail);
        if (m > 2 && std::abs(term0) * (1.0 + harmonic) < 1e-17 * scale &&
            std::abs(term1) * (2.0 + 2.0 * harmonic) < 1e-17 * scale)
            break;
    }
    s.i1 *= 0.5 * w;
    return s;
}

inline std::pair<cplx, cplx> k01_series(cplx w) {
    const SeriesTerms s = series(w);
    const cplx log_half = std::log(0.5 * w);
    const cplx k0 = -(log_half + euler_gamma) * s.i0 + s.k0_tail;
    const cplx k1 = 1.0 / w + log_half * s.i1 - 0.25 * w * s.k1_tail;
    return {k0, k1};
}

/// Steed's evaluation of Temme's continued fraction CF2 for nu = 0.
/// Valid and rapidly convergent for |w| >= 2 in the closed right half-plane.
inline std::pair<cplx, cplx> k01_continued_fraction(cplx w) {
    constexpr double eps = 1e-16;
    cplx b = 2.0 * (1.0 + w);
    cplx d = 1.0 / b;
    cplx h = d;
    cplx delh = d;
    cplx q1(0.0), q2(1.0);
    const double a1 = 0.25;
    cplx q(a1), c(a1);
    double a = -a1;
    cplx s = 1.0 + q * delh;
    int i = 1;
    for (; i < 10000; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const cplx qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const cplx dels = q * delh;
        s += dels;
        if (std::abs(dels) < eps * std::abs(s)) break;
    }
    if (i >= 10000) throw std::domain_error("bessel_K: continued fraction did not converge");
    h *= a1;
    const cplx k0 = std::sqrt(std::numbers::pi / (2.0 * w)) * std::exp(-w) / s;
    const cplx k1 = k0 * (w + 0.5 - h) / w;
    return {k0, k1};
}

} // namespace detail

/// K0 and K1 at the same argument (shared work in every branch).
inline std::pair<cplx, cplx> bessel_K01(cplx w) {
    detail::check_argument(w);
    if (std::abs(w) <= series_radius || w.real() < 0.0) return detail::k01_series(w);
    return detail::k01_continued_fraction(w);
}

inline cplx bessel_K0(cplx w) { return bessel_K01(w).first; }
inline cplx bessel_K1(cplx w) { return bessel_K01(w).second; }

/// Modified Bessel I0 by its ascending series.
inline cplx bessel_I0(cplx w) { return detail::series(w).i0; }

/// J0 on the real line. Even by construction: only |x| is used.
inline double bessel_J0(double x) {
    const double ax = std::fabs(x);
    if (ax <= 4.0) {
        const double t = -0.25 * ax * ax;
        double term = 1.0, sum = 1.0;
        for (int m = 1; m < 60; ++m) {
            term *= t / (double(m) * m);
            sum += term;
            if (std::fabs(term) < 1e-18) break;
        }
        return sum;
    }
    // J0(x) = Re H0(x), H0(x) = (2/(i pi)) K0(-i x)
    const cplx h0 = cplx(0.0, -2.0 / std::numbers::pi) * bessel_K0(cplx(0.0, -ax));
    return h0.real();
}

/// J1 on the real line (odd).
inline double bessel_J1(double x) {
    const double ax = std::fabs(x);
    double v;
    if (ax <= 4.0) {
        const double t = -0.25 * ax * ax;
        double term = 0.5 * ax, sum = term;
        for (int m = 1; m < 60; ++m) {
            term *= t / (double(m) * (m + 1));
            sum += term;
            if (std::fabs(term) < 1e-18) break;
        }
        v = sum;
    } else {
        // J1(x) = Re H1(x), H1(x) = -(2/pi) K1(-i x)
        v = (-2.0 / std::numbers::pi * bessel_K1(cplx(0.0, -ax))).real();
    }
    return x < 0.0 ? -v : v;
}

/// Decomposition K0(w) = log_coefficient * ln(w) + smooth_remainder with
/// log_coefficient = -I0(w); the remainder is entire.
struct LogSplit {
    cplx log_coefficient;
    cplx smooth_remainder;
};

inline LogSplit k0_log_split(cplx w, double split_radius = default_split_radius) {
    if (!(std::abs(w) <= split_radius))
        throw std::out_of_range("k0_log_split: |w| exceeds the split radius; evaluate K0 directly");
    const auto s = detail::series(w);
    const cplx remainder = (std::numbers::ln2 - euler_gamma) * s.i0 + s.k0_tail;
    return {-s.i0, remainder};
}

} // namespace quarterwave::specfun

#pragma once

// Generalized eigenfunctions and the on-shell scattering amplitude.
//
// For the symmetrized plane wave S(x) = 4 cos(k1 x1) cos(k2 x2) the
// scattering solution is psi+ = S + int G0(k+i0)(x, y) eta(y) dy with
//   eta = sgn(sigma) sqrt|sigma| h,   (1 + B(k+i0)) h = sqrt|sigma| S|_boundary,
// so that eta = sigma psi+ on the boundary. Along a ray x = r w' the
// scattered part behaves like f(k, w, w') e^{ikr} / sqrt(r) with
//   f = sqrt(2/pi) sqrt(i/k) sum_j int_0^inf eta_j(y) cos(k'_j y) dy,
// k' = k w', eta_j the density on axis j (j = 1 horizontal, 2 vertical).
// To first order in the coupling, eta = alpha sigma S|_boundary, giving
//   f = -alpha sum_j [sigma_hat(k'_j + k_j) + sigma_hat(k'_j - k_j)],
//   sigma_hat(xi) = -4 sqrt(i/(2 pi k)) int_0^inf sigma(y) cos(xi y) dy.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "kernels.hpp"
#include "nystrom.hpp"
#include "potential.hpp"
#include "quadrature.hpp"

namespace quarterwave {

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

struct IncomingWave {
    double k = 1.0;
    double omega1 = 1.0;
    double omega2 = 0.0;

    IncomingWave(double k_, double w1, double w2) : k(k_), omega1(w1), omega2(w2) {
        if (!(k_ > 0.0) || !std::isfinite(k_)) throw ValidationError("k must be positive");
        const double norm = std::hypot(w1, w2);
        if (!(std::fabs(norm - 1.0) < 1e-12)) throw ValidationError("omega must be a unit vector");
    }

    static IncomingWave from_degrees(double k, double omega_deg) {
        if (!std::isfinite(omega_deg)) throw ValidationError("omega-deg must be finite");
        const double t = degrees_to_radians(omega_deg);
        return IncomingWave(k, std::cos(t), std::sin(t));
    }

    double k1() const { return k * omega1; }
    double k2() const { return k * omega2; }
};

/// Outgoing direction (cos t, sin t) with t strictly between 0 and 90 degrees.
struct OutgoingDirection {
    double omega1;
    double omega2;

    static OutgoingDirection from_degrees(double deg) {
        if (!std::isfinite(deg) || deg < 0.0 || deg > 90.0)
            throw ValidationError("omega-prime-deg must lie in [0, 90]");
        if (deg == 0.0 || deg == 90.0)
            throw std::domain_error("the amplitude is defined only for directions w' other than (1,0) and (0,1)");
        const double t = degrees_to_radians(deg);
        return {std::cos(t), std::sin(t)};
    }
};

enum class AmplitudeMethod { full, weak_coupling };

inline const char* method_name(AmplitudeMethod m) { return m == AmplitudeMethod::full ? "full" : "weak_coupling"; }

struct AmplitudeRecord {
    double k = 0.0;
    double omega_deg = 0.0;
    double omega_prime_deg = 0.0;
    cplx f{0.0};
    AmplitudeMethod method = AmplitudeMethod::full;
};

/// Sum over the four sign choices of exp(i(+-k1 x1 +- k2 x2)).
inline cplx sym_plane_wave(const IncomingWave& wave, PlanePoint x) {
    return 4.0 * std::cos(wave.k1() * x.x1) * std::cos(wave.k2() * x.x2);
}

/// sqrt|sigma(y)| times the trace 4 cos(k_j y) of S on the node's axis.
inline Eigen::VectorXcd boundary_rhs(const IncomingWave& wave, const BoundaryPotential& pot, const BoundaryGrid& grid) {
    const std::size_t n = grid.total();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(Eigen::Index(n));
    for (std::size_t j = 0; j < n; ++j) {
        const BoundaryPoint p = grid.point(j);
        const double s = pot(p.coordinate);
        if (s == 0.0) continue;
        const double kj = p.axis == Axis::horizontal ? wave.k1() : wave.k2();
        rhs(Eigen::Index(j)) = std::sqrt(std::fabs(s)) * 4.0 * std::cos(kj * p.coordinate);
    }
    return rhs;
}

/// psi+ for one incoming wave; the boundary density is solved once.
class GeneralizedEigenfunction {
public:
    GeneralizedEigenfunction(const IncomingWave& wave, const BoundaryPotential& pot, const GridOptions& grid_opt = {})
        : GeneralizedEigenfunction(wave, pot, build_grid(pot, grid_opt)) {}

    GeneralizedEigenfunction(const IncomingWave& wave, const BoundaryPotential& pot, BoundaryGrid grid)
        : wave_(wave), k_(Wavenumber::real_axis(wave.k)), grid_(std::move(grid)), sigma_(node_sigma(grid_, pot)) {
        density_ = Eigen::VectorXcd::Zero(Eigen::Index(grid_.total()));
        if (sigma_.all_zero) return;
        const KernelMatrix m = assemble(k_, grid_, pot);
        const Eigen::VectorXcd h = m.solve(boundary_rhs(wave_, pot, grid_));
        for (Eigen::Index j = 0; j < h.size(); ++j) density_(j) = sigma_.signed_root[std::size_t(j)] * h(j);
    }

    /// psi+(x) - S(x).
    cplx scattered(PlanePoint x) const {
        if (sigma_.all_zero) return 0.0;
        const std::vector<cplx> w = layer_weights(k_, grid_, x);
        cplx acc(0.0);
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * density_(Eigen::Index(j));
        return acc;
    }

    cplx operator()(PlanePoint x) const {
        if (x.x1 < 0.0 || x.x2 < 0.0) throw ValidationError("evaluation point must lie in the quarter plane");
        return sym_plane_wave(wave_, x) + scattered(x);
    }

    /// f(k, w, w') from the boundary density.
    cplx amplitude(const OutgoingDirection& out) const {
        if (sigma_.all_zero) return 0.0;
        const double kp[2] = {wave_.k * out.omega1, wave_.k * out.omega2};
        const std::size_t n = grid_.per_axis();
        cplx c(0.0);
        for (std::size_t j = 0; j < grid_.total(); ++j) {
            const double y = grid_.point(j).coordinate;
            c += density_(Eigen::Index(j)) * std::cos(kp[j / n] * y) * grid_.weight(j);
        }
        const cplx root_ik = std::sqrt(cplx(0.0, 1.0 / wave_.k));
        return std::sqrt(2.0 / std::numbers::pi) * root_ik * c;
    }

    const Eigen::VectorXcd& density() const { return density_; }
    const BoundaryGrid& grid() const { return grid_; }
    const IncomingWave& wave() const { return wave_; }

private:
    IncomingWave wave_;
    Wavenumber k_;
    BoundaryGrid grid_;
    NodeSigma sigma_;
    Eigen::VectorXcd density_;
};

inline cplx generalized_eigenfunction(const IncomingWave& wave, const BoundaryPotential& pot, const GridOptions& grid_opt,
                                      PlanePoint x) {
    return GeneralizedEigenfunction(wave, pot, grid_opt)(x);
}

inline double direction_degrees(double w1, double w2) { return std::atan2(w2, w1) * 180.0 / std::numbers::pi; }

inline AmplitudeRecord scattering_amplitude(const IncomingWave& wave, const OutgoingDirection& out,
                                            const BoundaryPotential& pot, const GridOptions& grid_opt = {}) {
    AmplitudeRecord rec;
    rec.k = wave.k;
    rec.omega_deg = direction_degrees(wave.omega1, wave.omega2);
    rec.omega_prime_deg = direction_degrees(out.omega1, out.omega2);
    rec.method = AmplitudeMethod::full;
    rec.f = GeneralizedEigenfunction(wave, pot, grid_opt).amplitude(out);
    return rec;
}

namespace detail {

/// int_0^inf sigma(y) cos(xi y) dy for the unscaled profile, by composite
/// Gauss rules between the profile's breakpoints.
inline double cosine_transform(const BoundaryPotential& pot, double xi) {
    std::vector<double> cuts{0.0};
    double end = 0.0;
    if (const auto* e = std::get_if<ExponentialShape>(&pot.shape())) {
        end = std::log(1e17) / e->mu; // e^{-mu y} below 1e-17
    } else {
        const auto bp = pot.breakpoints();
        end = bp.empty() ? 0.0 : bp.back();
    }
    for (double b : pot.breakpoints())
        if (b > cuts.back() && b <= end) cuts.push_back(b);
    if (end > cuts.back()) cuts.push_back(end);
    const GaussRule& rule = gauss_legendre(20);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const int pieces = 1 + int(std::ceil((b - a) * (std::fabs(xi) + 1.0)));
        const double width = (b - a) / pieces;
        for (int p = 0; p < pieces; ++p) {
            const double c = a + (p + 0.5) * width, r = 0.5 * width;
            for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
                const double y = c + r * rule.nodes[m];
                total += rule.weights[m] * r * pot.profile(y) * std::cos(xi * y);
            }
        }
    }
    return total;
}

} // namespace detail

/// sigma_hat_k(xi) = -4 sqrt(i/(2 pi k)) int_0^inf sigma(y) cos(xi y) dy for
/// the unscaled profile, by quadrature.
inline cplx sigma_hat(double k, double xi, const BoundaryPotential& pot) {
    if (!(k > 0.0)) throw ValidationError("k must be positive");
    const cplx pref = -4.0 * std::sqrt(cplx(0.0, 1.0 / (2.0 * std::numbers::pi * k)));
    return pref * detail::cosine_transform(pot, xi);
}

/// Closed form for a step profile: -(4 sigma0 / xi) sqrt(i/(2 pi k)) sin(xi L).
inline cplx sigma_hat_step(double k, double xi, double sigma0, double length) {
    if (!(k > 0.0)) throw ValidationError("k must be positive");
    const cplx pref = -4.0 * sigma0 * std::sqrt(cplx(0.0, 1.0 / (2.0 * std::numbers::pi * k)));
    const double x = xi * length;
    // sin(x)/xi with its removable singularity at 0
    const double sinc = std::fabs(x) < 1e-4 ? length * (1.0 - x * x / 6.0) : std::sin(x) / xi;
    return pref * sinc;
}

/// First-order amplitude -alpha sum_j [sigma_hat(k'_j + k_j) + sigma_hat(k'_j - k_j)]
/// built from the unscaled profile of pot and the given coupling.
inline AmplitudeRecord weak_coupling_amplitude(const IncomingWave& wave, const OutgoingDirection& out,
                                               const BoundaryPotential& pot, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be non-negative");
    AmplitudeRecord rec;
    rec.k = wave.k;
    rec.omega_deg = direction_degrees(wave.omega1, wave.omega2);
    rec.omega_prime_deg = direction_degrees(out.omega1, out.omega2);
    rec.method = AmplitudeMethod::weak_coupling;
    if (alpha == 0.0) return rec;
    const double kj[2] = {wave.k1(), wave.k2()};
    const double kp[2] = {wave.k * out.omega1, wave.k * out.omega2};
    cplx sum(0.0);
    for (int j = 0; j < 2; ++j) sum += sigma_hat(wave.k, kp[j] + kj[j], pot) + sigma_hat(wave.k, kp[j] - kj[j], pot);
    rec.f = -alpha * sum;
    return rec;
}

/// lim_{k -> 0} k |f_weak|^2 / (alpha int sigma)^2 evaluated at a small k;
/// equals 128/pi for any profile with finite integral.
inline double low_energy_constant(const BoundaryPotential& pot, double k = 1e-6) {
    const double integral = detail::cosine_transform(pot, 0.0);
    if (integral == 0.0) throw ValidationError("low-energy constant needs a profile with nonzero integral");
    const IncomingWave wave = IncomingWave::from_degrees(k, 45.0);
    const OutgoingDirection out = OutgoingDirection::from_degrees(60.0);
    const cplx f = weak_coupling_amplitude(wave, out, pot, 1.0).f;
    return k * std::norm(f) / (integral * integral);
}

} // namespace quarterwave

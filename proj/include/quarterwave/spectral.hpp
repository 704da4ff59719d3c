#pragma once

// Negative and positive spectral axis: bound states as zeros of
// 1 + B(i kappa), the positive-axis scan of smin(1 + B(k + i0)), and the
// kernel of the free spectral projection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "errors.hpp"
#include "kernels.hpp"
#include "nystrom.hpp"
#include "potential.hpp"
#include "specfun.hpp"

namespace quarterwave {

struct BoundState {
    double kappa = 0.0;
    double energy = 0.0;
    double smin_at_root = 0.0;
    /// (kappa, signed smin) at every evaluation used by the refinement.
    std::vector<std::pair<double, double>> history;
};

struct BoundStateOptions {
    GridOptions grid;
    int samples = 24;
    /// Smallest accepted smin for a touch-down minimum without sign change.
    double root_tolerance = 1e-8;
};

/// Signed smallest singular value of 1 + B(i kappa): smin times the sign of
/// det(1 + B), which is real on the imaginary axis.
inline double signed_smin(const BoundaryGrid& grid, const BoundaryPotential& pot, double kappa) {
    return assemble(Wavenumber::imaginary(kappa), grid, pot).signed_min_singular_value();
}

/// All zeros of 1 + B(i kappa) in [kappa_min, kappa_max]. Sign changes of the
/// signed smin are bracketed on a uniform sample grid and refined to machine
/// precision; interior minima of |smin| without a sign change are refined by
/// Brent minimization and accepted when they reach root_tolerance.
inline std::vector<BoundState> find_bound_states(const BoundaryPotential& pot, double kappa_min, double kappa_max,
                                                 const BoundStateOptions& opt = {},
                                                 std::vector<std::string>* warnings = nullptr) {
    if (!(kappa_min > 0.0) || !(kappa_max > kappa_min) || !std::isfinite(kappa_max))
        throw ValidationError("kappa range must satisfy 0 < kappa_min < kappa_max");
    if (opt.samples < 3) throw ValidationError("samples must be at least 3");
    const BoundaryGrid grid = build_grid(pot, opt.grid);
    if (node_sigma(grid, pot).all_zero) return {};

    const int n = opt.samples;
    std::vector<double> ks(n), fs(n);
    for (int i = 0; i < n; ++i) {
        ks[i] = kappa_min + (kappa_max - kappa_min) * i / (n - 1);
        fs[i] = signed_smin(grid, pot, ks[i]);
    }

    std::vector<BoundState> found;
    auto record = [&](BoundState&& s) {
        s.energy = -s.kappa * s.kappa;
        found.push_back(std::move(s));
    };

    for (int i = 0; i + 1 < n; ++i) {
        if (fs[i] == 0.0) {
            BoundState s;
            s.kappa = ks[i];
            s.history = {{ks[i], fs[i]}};
            record(std::move(s));
            continue;
        }
        if ((fs[i] > 0.0) == (fs[i + 1] > 0.0) || fs[i + 1] == 0.0) continue;
        BoundState s;
        auto f = [&](double kap) {
            const double v = signed_smin(grid, pot, kap);
            s.history.emplace_back(kap, v);
            return v;
        };
        std::uintmax_t iterations = 200;
        const auto bracket = boost::math::tools::toms748_solve(
            f, ks[i], ks[i + 1], fs[i], fs[i + 1], boost::math::tools::eps_tolerance<double>(50), iterations);
        // keep the endpoint with the smaller |smin|
        const double fa = std::fabs(signed_smin(grid, pot, bracket.first));
        const double fb = std::fabs(signed_smin(grid, pot, bracket.second));
        s.kappa = fa <= fb ? bracket.first : bracket.second;
        s.smin_at_root = std::min(fa, fb);
        if (bracket.second - bracket.first > 1e-8)
            throw NumericalError("find_bound_states: root refinement did not reach |dkappa| <= 1e-8");
        record(std::move(s));
    }

    // touch-down minima of |smin| between samples, no sign change
    int extrema = 0;
    for (int i = 1; i + 1 < n; ++i) {
        const double a = std::fabs(fs[i - 1]), b = std::fabs(fs[i]), c = std::fabs(fs[i + 1]);
        if (!(b < a && b < c)) continue;
        ++extrema;
        if ((fs[i - 1] > 0.0) != (fs[i + 1] > 0.0)) continue; // already handled as a sign change
        BoundState s;
        auto g = [&](double kap) {
            const double v = signed_smin(grid, pot, kap);
            s.history.emplace_back(kap, v);
            return std::fabs(v);
        };
        std::uintmax_t iterations = 100;
        const auto best = boost::math::tools::brent_find_minima(g, ks[i - 1], ks[i + 1], 40, iterations);
        if (best.second <= opt.root_tolerance) {
            s.kappa = best.first;
            s.smin_at_root = best.second;
            record(std::move(s));
        }
    }
    if (warnings && extrema > n / 4) {
        std::ostringstream msg;
        msg << "resolution warning: smin oscillates at the sample scale (" << extrema
            << " local minima in " << n << " samples); increase samples or refine the grid";
        warnings->push_back(msg.str());
    }
    std::sort(found.begin(), found.end(), [](const BoundState& a, const BoundState& b) { return a.kappa < b.kappa; });
    return found;
}

struct AxisScan {
    std::vector<double> k;
    std::vector<double> smin;
    double threshold = 0.0;
    std::vector<std::pair<double, double>> flagged;
};

/// smin(1 + B(k + i0)) on a uniform grid of k; maximal runs of samples below
/// 1e-6 times the median are flagged as intervals.
inline AxisScan scan_positive_axis(const BoundaryPotential& pot, double k_min, double k_max, int samples,
                                   const GridOptions& grid_opt = {}, double relative_threshold = 1e-6) {
    if (!(k_min > 0.0) || !(k_max > k_min) || !std::isfinite(k_max))
        throw ValidationError("k range must satisfy 0 < k_min < k_max");
    if (samples < 2) throw ValidationError("samples must be at least 2");
    const BoundaryGrid grid = build_grid(pot, grid_opt);
    AxisScan scan;
    scan.k.resize(samples);
    scan.smin.resize(samples);
    for (int i = 0; i < samples; ++i) {
        scan.k[i] = k_min + (k_max - k_min) * i / (samples - 1);
        scan.smin[i] = assemble(Wavenumber::real_axis(scan.k[i]), grid, pot).min_singular_value();
    }
    std::vector<double> sorted = scan.smin;
    std::nth_element(sorted.begin(), sorted.begin() + samples / 2, sorted.end());
    scan.threshold = relative_threshold * sorted[samples / 2];
    for (int i = 0; i < samples;) {
        if (scan.smin[i] >= scan.threshold) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < samples && scan.smin[j + 1] < scan.threshold) ++j;
        scan.flagged.emplace_back(scan.k[std::max(i - 1, 0)], scan.k[std::min(j + 1, samples - 1)]);
        i = j + 1;
    }
    return scan;
}

/// Kernel of the free Neumann spectral projection E0([lambda1, lambda2]):
///   (1/4pi) int_{lambda1}^{lambda2} sum_images J0(sqrt(lambda) d_m) dlambda
/// evaluated in closed form through int J0(p d) p dp = p J1(p d) / d.
inline double free_projection_kernel(double lambda1, double lambda2, PlanePoint x, PlanePoint y) {
    if (!(lambda1 >= 0.0) || !(lambda2 >= lambda1) || !std::isfinite(lambda2))
        throw ValidationError("energy interval must satisfy 0 <= lambda1 <= lambda2");
    if (lambda1 == lambda2) return 0.0;
    const double p1 = std::sqrt(lambda1), p2 = std::sqrt(lambda2);
    auto primitive = [](double p, double d) {
        const double pd = p * d;
        if (pd < 1e-4) return 0.5 * p * p * (1.0 - pd * pd / 8.0);
        return p * specfun::bessel_J1(pd) / d;
    };
    double total = 0.0;
    for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) {
            const double d = std::hypot(x.x1 - s1 * y.x1, x.x2 - s2 * y.x2);
            total += primitive(p2, d) - primitive(p1, d);
        }
    return total / (2.0 * std::numbers::pi);
}

} // namespace quarterwave

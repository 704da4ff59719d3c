#pragma once

// Resolvent (-Delta_sigma - z)^{-1} applied to sampled functions:
//   R(z) f = R0(z) f - B1(k)* (1 + B(k))^{-1} B0(k) f,   k = sqrt z, Im k > 0.
//
// R0 f is a product rule over the sample lattice. Summing G0 over the four
// images of y is the same as integrating the even extension of f over the
// whole plane against G(|x - y|), so the rule is the rectangle rule for the
// even extension: plain node values everywhere except the lattice cell that
// contains x, which is integrated exactly in polar coordinates around x
// with f frozen at the cell's node.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "kernels.hpp"
#include "nystrom.hpp"
#include "parallel.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "sampled_field.hpp"
#include "specfun.hpp"

namespace quarterwave {

namespace detail {

/// int over the square [c - h/2, c + h/2]^2 of G(|x - y|) dy, x inside the square.
inline cplx cell_integral(const Wavenumber& k, PlanePoint x, PlanePoint c, double h) {
    const cplx a = k.bessel_scale();
    constexpr double inv2pi = 1.0 / (2.0 * std::numbers::pi);
    // int_0^R K0(a r) r dr = (1 - a R K1(a R)) / a^2
    auto radial = [&](double R) {
        if (R <= 0.0) return cplx(0.0);
        const cplx w = a * R;
        if (std::abs(w) < 1e-6) return cplx(0.5 * R * R * (0.5 - std::log(0.5 * w) - specfun::euler_gamma));
        return (1.0 - w * specfun::bessel_K1(w)) / (a * a);
    };
    const double lo1 = c.x1 - 0.5 * h, hi1 = c.x1 + 0.5 * h;
    const double lo2 = c.x2 - 0.5 * h, hi2 = c.x2 + 0.5 * h;
    const PlanePoint corners[4] = {{hi1, lo2}, {hi1, hi2}, {lo1, hi2}, {lo1, lo2}};
    const GaussRule& rule = gauss_legendre(16);
    // Triangle (x, p, q) in polar form, parametrized by the signed position u
    // along the edge measured from the foot of the perpendicular:
    // dtheta = d du / (d^2 + u^2). Panels grow geometrically away from the
    // foot so the peak of width d is resolved however close x is to the edge.
    auto along_edge = [&](double d, double u0, double u1) {
        cplx acc(0.0);
        for (double a = u0; a < u1;) {
            const double b = std::min(u1, std::max(2.0 * a, a + d));
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
                const double u = mid + half * rule.nodes[m];
                acc += rule.weights[m] * half * d / (d * d + u * u) * radial(std::hypot(d, u));
            }
            a = b;
        }
        return acc;
    };
    cplx total(0.0);
    for (int e = 0; e < 4; ++e) {
        const PlanePoint p = corners[e], q = corners[(e + 1) % 4];
        const double ex = q.x1 - p.x1, ey = q.x2 - p.x2, len = std::hypot(ex, ey);
        const double nx = ey / len, ny = -ex / len; // outward normal for counterclockwise edges
        const double dist = (p.x1 - x.x1) * nx + (p.x2 - x.x2) * ny;
        if (dist <= 0.0) continue; // x on this edge: degenerate triangle
        const double up = ((p.x1 - x.x1) * ex + (p.x2 - x.x2) * ey) / len;
        const double uq = up + len;
        if (up >= 0.0) total += along_edge(dist, up, uq);
        else if (uq <= 0.0) total += along_edge(dist, -uq, -up);
        else total += along_edge(dist, 0.0, -up) + along_edge(dist, 0.0, uq);
    }
    return total * inv2pi;
}

} // namespace detail

/// R0(z) f at an arbitrary point of the closed quarter plane.
inline cplx apply_free_resolvent(cplx z, const SampledField& f, PlanePoint x,
                                 std::vector<std::string>* warnings = nullptr) {
    const Wavenumber k = Wavenumber::from_energy(z);
    const double h = f.h;
    if (x.x1 < 0.0 || x.x2 < 0.0) throw ValidationError("evaluation point must lie in the quarter plane");
    const long ci = std::lround(x.x1 / h), cj = std::lround(x.x2 / h);
    cplx total(0.0);
    for (std::size_t j = 0; j < f.ny; ++j) {
        for (std::size_t i = 0; i < f.nx; ++i) {
            const cplx v = f.at(i, j);
            if (v == cplx(0.0)) continue;
            for (int s1 : {1, -1}) {
                if (i == 0 && s1 < 0) continue;
                for (int s2 : {1, -1}) {
                    if (j == 0 && s2 < 0) continue;
                    const long ii = s1 * long(i), jj = s2 * long(j);
                    if (ii == ci && jj == cj) {
                        total += v * detail::cell_integral(k, x, {double(ii) * h, double(jj) * h}, h);
                        if (warnings && std::abs(k.value()) * h > 0.5) {
                            std::ostringstream msg;
                            msg << "accuracy warning: |k| h = " << std::abs(k.value()) * h
                                << " inside the support; refine the sampling";
                            warnings->push_back(msg.str());
                        }
                        continue;
                    }
                    const double r = std::hypot(x.x1 - ii * h, x.x2 - jj * h);
                    total += v * green_free(k, r) * (h * h);
                }
            }
        }
    }
    return total;
}

/// R0(z) f at every node (i h, j h), i < nx, j < ny, via a table of G over
/// lattice offsets.
inline SampledField apply_free_resolvent_on_grid(cplx z, const SampledField& f, std::size_t nx, std::size_t ny) {
    const Wavenumber k = Wavenumber::from_energy(z);
    const double h = f.h;
    const std::size_t mx = std::max(nx, f.nx) + 1, my = std::max(ny, f.ny) + 1;
    // table of h^2 G(h sqrt(a^2 + b^2)) for offsets 0 <= a < mx + f.nx, 0 <= b < my + f.ny
    const std::size_t ta = mx + f.nx, tb = my + f.ny;
    std::vector<cplx> table(ta * tb);
    parallel_for(tb, [&](std::size_t b) {
        for (std::size_t a = 0; a < ta; ++a)
            table[b * ta + a] = (a == 0 && b == 0)
                                    ? detail::cell_integral(k, {0.0, 0.0}, {0.0, 0.0}, h)
                                    : green_free(k, h * std::hypot(double(a), double(b))) * (h * h);
    });
    struct Source {
        long i, j;
        cplx v;
    };
    std::vector<Source> sources;
    for (std::size_t j = 0; j < f.ny; ++j)
        for (std::size_t i = 0; i < f.nx; ++i)
            if (f.at(i, j) != cplx(0.0)) sources.push_back({long(i), long(j), f.at(i, j)});

    SampledField out(h, nx, ny);
    parallel_for(ny, [&](std::size_t tj) {
        for (std::size_t ti = 0; ti < nx; ++ti) {
            cplx acc(0.0);
            for (const Source& s : sources) {
                const std::size_t d1 = std::size_t(std::labs(long(ti) - s.i));
                const std::size_t e1 = std::size_t(long(ti) + s.i);
                const std::size_t d2 = std::size_t(std::labs(long(tj) - s.j));
                const std::size_t e2 = std::size_t(long(tj) + s.j);
                cplx g = table[d2 * ta + d1];
                if (s.i != 0) g += table[d2 * ta + e1];
                if (s.j != 0) g += table[e2 * ta + d1];
                if (s.i != 0 && s.j != 0) g += table[e2 * ta + e1];
                acc += s.v * g;
            }
            out.at(ti, tj) = acc;
        }
    });
    return out;
}

/// Full resolvent for one source field; the boundary density is computed
/// once and reused for every evaluation point.
class ResolventSolver {
public:
    ResolventSolver(cplx z, const SampledField& f, const BoundaryPotential& pot, const GridOptions& grid_opt = {})
        : z_(z), k_(Wavenumber::from_energy(z)), f_(f), grid_(build_grid(pot, grid_opt)), sigma_(node_sigma(grid_, pot)) {
        f_.validate();
        if (sigma_.all_zero) return;
        const std::size_t n = grid_.total();
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(Eigen::Index(n));
        std::vector<cplx> trace(n, 0.0);
        parallel_for(n, [&](std::size_t j) {
            if (sigma_.root[j] != 0.0) trace[j] = apply_free_resolvent(z_, f_, grid_.point(j).embed());
        });
        for (std::size_t j = 0; j < n; ++j) rhs(Eigen::Index(j)) = sigma_.root[j] * trace[j];
        const KernelMatrix m = assemble(k_, grid_, pot);
        const Eigen::VectorXcd h = m.solve(rhs);
        density_.resize(Eigen::Index(n));
        for (std::size_t j = 0; j < n; ++j) density_(Eigen::Index(j)) = sigma_.signed_root[j] * h(Eigen::Index(j));
    }

    /// -B1* (1+B)^{-1} B0 f at x, i.e. int G0(x, y) eta(y) dy.
    cplx correction(PlanePoint x) const {
        if (sigma_.all_zero) return 0.0;
        const std::vector<cplx> w = layer_weights(k_, grid_, x);
        cplx acc(0.0);
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * density_(Eigen::Index(j));
        return acc;
    }

    cplx operator()(PlanePoint x, std::vector<std::string>* warnings = nullptr) const {
        return apply_free_resolvent(z_, f_, x, warnings) + correction(x);
    }

    /// R(z) f on the lattice nodes i < nx, j < ny of the source spacing.
    SampledField on_grid(std::size_t nx, std::size_t ny) const {
        SampledField out = apply_free_resolvent_on_grid(z_, f_, nx, ny);
        if (sigma_.all_zero) return out;
        parallel_for(ny, [&](std::size_t j) {
            for (std::size_t i = 0; i < nx; ++i) out.at(i, j) += correction({i * f_.h, j * f_.h});
        });
        return out;
    }

    const BoundaryGrid& grid() const { return grid_; }

private:
    cplx z_;
    Wavenumber k_;
    SampledField f_;
    BoundaryGrid grid_;
    NodeSigma sigma_;
    Eigen::VectorXcd density_;
};

inline cplx apply_resolvent(cplx z, const SampledField& f, const BoundaryPotential& pot, const GridOptions& grid_opt,
                            PlanePoint x) {
    return ResolventSolver(z, f, pot, grid_opt)(x);
}

} // namespace quarterwave

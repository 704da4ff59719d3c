#pragma once

// Finite-difference model of -Delta on [0, X)^2 with the Robin condition
// d_n u + sigma u = 0 on the two axes and u = 0 on the far sides x = X.
//
// Unknowns sit at (i h, j h), 0 <= i, j < n = X/h. On the axes the
// ghost-point relation (u_{-1} - u_1)/(2h) = sigma u_0 eliminates the ghost
// value; the resulting rows equal D^{-1} K with K symmetric and D the
// half-cell weights (1 inside, 1/2 on an axis, 1/4 at the corner). The
// operator is stored in the symmetric form S = D^{-1/2} K D^{-1/2}, which
// has the same spectrum. Sigma enters through its average over the boundary
// half-cell of each node.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "errors.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "sampled_field.hpp"

namespace quarterwave {

struct FdOperator {
    double X = 0.0;
    double h = 0.0;
    std::size_t n = 0;
    Eigen::SparseMatrix<double> stiffness; // K
    Eigen::VectorXd mass;                  // diagonal of D
    Eigen::SparseMatrix<double> symmetric; // D^{-1/2} K D^{-1/2}
    double sigma_bound = 0.0;              // max |cell-averaged sigma|

    std::size_t index(std::size_t i, std::size_t j) const { return j * n + i; }
    std::size_t size() const { return n * n; }
};

namespace detail {

inline std::size_t fd_points(double X, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("h must be positive");
    if (!(X > 0.0) || !std::isfinite(X)) throw ValidationError("X must be positive");
    const double ratio = X / h;
    const double rounded = std::round(ratio);
    if (rounded < 2.0 || std::fabs(ratio - rounded) > 1e-9 * ratio)
        throw ValidationError("X/h must be an integer of at least 2");
    return std::size_t(rounded);
}

/// Builds K, D and S from boundary half-cell integrals of sigma:
/// cell(i) = int over [(i-1/2)h, (i+1/2)h] clipped to [0, X].
inline FdOperator build_fd(double X, double h, const std::function<double(double, double)>& sigma_integral) {
    FdOperator op;
    op.X = X;
    op.h = h;
    op.n = fd_points(X, h);
    const std::size_t n = op.n;
    const double ih2 = 1.0 / (h * h);

    std::vector<double> sbar(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? 0.0 : (i - 0.5) * h;
        const double hi = (i + 0.5) * h;
        sbar[i] = sigma_integral(lo, hi) / (hi - lo);
        op.sigma_bound = std::max(op.sigma_bound, std::fabs(sbar[i]));
    }

    op.mass.resize(Eigen::Index(n * n));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = op.index(i, j);
            const double wi = i == 0 ? 0.5 : 1.0, wj = j == 0 ? 0.5 : 1.0;
            op.mass(Eigen::Index(row)) = wi * wj;
            // Dirichlet form over the dual cell: each link weighted by the dual face length
            double diag = 0.0;
            auto link = [&](std::size_t ii, std::size_t jj, double weight) {
                diag += weight * ih2;
                if (ii < n && jj < n) trip.emplace_back(row, op.index(ii, jj), -weight * ih2);
            };
            link(i + 1, j, wj);
            if (i > 0) link(i - 1, j, wj);
            link(i, j + 1, wi);
            if (j > 0) link(i, j - 1, wi);
            // boundary term -int sigma |u|^2 over the axis part of the dual cell
            if (j == 0) diag -= wi * sbar[i] / h;
            if (i == 0) diag -= wj * sbar[j] / h;
            trip.emplace_back(row, row, diag);
        }
    }
    op.stiffness.resize(Eigen::Index(n * n), Eigen::Index(n * n));
    op.stiffness.setFromTriplets(trip.begin(), trip.end());
    const Eigen::VectorXd inv_root = op.mass.cwiseSqrt().cwiseInverse();
    op.symmetric = inv_root.asDiagonal() * op.stiffness * inv_root.asDiagonal();
    op.symmetric.makeCompressed();
    return op;
}

} // namespace detail

/// The boundary potential must be essentially supported in [0, X/4].
inline FdOperator assemble_fd(const BoundaryPotential& pot, double X, double h) {
    detail::fd_points(X, h);
    const double sup = pot.sup_abs();
    if (sup > 0.0) {
        const double radius = support_radius(pot, 1e-10 * sup);
        if (X < 4.0 * radius) {
            std::ostringstream msg;
            msg << "X must be at least 4 times the support radius (" << radius << ")";
            throw ValidationError(msg.str());
        }
    }
    const double alpha = pot.alpha();
    return detail::build_fd(X, h, [&](double a, double b) { return alpha * pot.profile_integral(a, b); });
}

/// Oracle-only variant for profiles that are not BoundaryPotential shapes
/// (e.g. sigma constant on the whole truncated axis).
inline FdOperator assemble_fd_profile(const std::function<double(double)>& sigma, double X, double h) {
    const GaussRule& rule = gauss_legendre(8);
    return detail::build_fd(X, h, [&](double a, double b) {
        const double c = 0.5 * (a + b), r = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t m = 0; m < rule.nodes.size(); ++m) s += rule.weights[m] * sigma(c + r * rule.nodes[m]);
        return s * r;
    });
}

struct FdEigenOptions {
    double tolerance = 1e-10;
    int max_iterations = 500;
    unsigned seed = 12345;
};

/// The m smallest eigenvalues (ascending) by shifted block inverse
/// iteration with Rayleigh-Ritz on m+1 vectors. The shift sits below the
/// spectrum so the shifted operator admits a Cholesky factorization.
inline std::vector<double> lowest_eigenvalues(const FdOperator& op, int m, const FdEigenOptions& opt = {}) {
    if (m < 1) throw ValidationError("m must be at least 1");
    const Eigen::Index N = Eigen::Index(op.size());
    const int p = std::min<int>(m + 1, int(N));
    using SparseMat = Eigen::SparseMatrix<double>;
    SparseMat identity(N, N);
    identity.setIdentity();

    // spectrum of S is bounded below by roughly -2 sup sigma^2
    double shift = -3.0 * op.sigma_bound * op.sigma_bound - 0.1;
    Eigen::SimplicialLLT<SparseMat, Eigen::Lower> chol;
    auto factor = [&](double s) {
        for (int attempt = 0; attempt < 20; ++attempt) {
            const SparseMat shifted = op.symmetric - s * identity;
            chol.compute(shifted);
            if (chol.info() == Eigen::Success) return s;
            s = 2.0 * s - 1.0;
        }
        throw NumericalError("lowest_eigenvalues: shifted operator could not be factorized");
    };
    shift = factor(shift);

    std::mt19937 rng(opt.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd V(N, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < N; ++i) V(i, j) = normal(rng);

    Eigen::VectorXd theta = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity());
    for (int it = 0; it < opt.max_iterations; ++it) {
        Eigen::MatrixXd W = chol.solve(V);
        if (chol.info() != Eigen::Success) throw NumericalError("lowest_eigenvalues: solve failed");
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, p);
        const Eigen::MatrixXd H = Q.transpose() * (op.symmetric * Q);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
        V = Q * es.eigenvectors();
        const Eigen::VectorXd next = es.eigenvalues();
        double change = 0.0;
        for (int j = 0; j < m; ++j)
            change = std::max(change, std::fabs(next(j) - theta(j)) / std::max(1.0, std::fabs(next(j))));
        theta = next;
        if (change < opt.tolerance) {
            std::vector<double> out(theta.data(), theta.data() + m);
            return out;
        }
    }
    std::ostringstream msg;
    msg << "lowest_eigenvalues: no convergence after " << opt.max_iterations << " iterations (last Ritz values";
    for (int j = 0; j < m; ++j) msg << ' ' << theta(j);
    msg << ", shift " << shift << ")";
    throw NumericalError(msg.str());
}

/// Solves (A - z) u = f with A = D^{-1} K, f sampled on the operator grid
/// (missing samples are zero). Returns u on the full n x n grid.
inline SampledField fd_resolvent_solve(const FdOperator& op, std::complex<double> z, const SampledField& f) {
    if (std::fabs(f.h - op.h) > 1e-12 * op.h) throw ValidationError("field spacing must match the operator spacing");
    if (f.nx > op.n || f.ny > op.n) throw ValidationError("field extends beyond the operator box");
    const Eigen::Index N = Eigen::Index(op.size());
    using CSparse = Eigen::SparseMatrix<std::complex<double>>;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
    for (std::size_t j = 0; j < f.ny; ++j)
        for (std::size_t i = 0; i < f.nx; ++i) {
            const Eigen::Index r = Eigen::Index(op.index(i, j));
            rhs(r) = op.mass(r) * f.at(i, j);
        }
    SampledField u(op.h, op.n, op.n);
    if (rhs.squaredNorm() == 0.0) return u;

    // (K - z D) u = D f keeps the symmetric structure
    CSparse system = op.stiffness.cast<std::complex<double>>();
    for (Eigen::Index r = 0; r < N; ++r) system.coeffRef(r, r) -= z * op.mass(r);
    system.makeCompressed();
    Eigen::SparseLU<CSparse> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success)
        throw NumericalError("fd_resolvent_solve: factorization failed; z is too close to an eigenvalue");
    Eigen::VectorXcd sol = lu.solve(rhs);
    for (int pass = 0; pass < 3; ++pass) {
        const Eigen::VectorXcd res = rhs - system * sol;
        if (res.norm() <= 1e-10 * rhs.norm()) break;
        if (pass == 2) throw NumericalError("fd_resolvent_solve: residual above 1e-10; z is too close to an eigenvalue");
        sol += lu.solve(res);
    }
    if (!sol.allFinite() || sol.norm() > 1e12 * rhs.norm() / std::min(1.0, op.h * op.h))
        throw NumericalError("fd_resolvent_solve: z is too close to an eigenvalue");
    for (std::size_t j = 0; j < op.n; ++j)
        for (std::size_t i = 0; i < op.n; ++i) u.at(i, j) = sol(Eigen::Index(op.index(i, j)));
    return u;
}

} // namespace quarterwave

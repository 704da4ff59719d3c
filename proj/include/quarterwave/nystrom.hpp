#pragma once

// Nystrom discretization of 1 + B(k) on the two boundary half-lines.
//
// A density rho on the boundary is represented by its values at
// Gauss-Legendre nodes, panel by panel. The single-layer integral
//   int G0(k)(x, y) rho(y) dy
// is replaced by sum_j W_j(x) rho_j with W_j(x) = int G0(x, y) l_j(y) dy,
// where l_j is the Lagrange basis of the panel holding node j. The image
// structure of G0 turns each panel into two source segments, the panel
// itself and its mirror across the corner, each with factor 2. Three
// quadratures compute W_j(x) for one segment:
//   far   plain Gauss at the nodes
//   self  x is a node of the segment: product integration against ln|s-t|
//         with closed-form Legendre log moments
//   near  geometric refinement toward the closest point of the segment

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"
#include "kernels.hpp"
#include "parallel.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace quarterwave {

struct Panel {
    double a;
    double b;
    double center() const { return 0.5 * (a + b); }
    double half_length() const { return 0.5 * (b - a); }
};

/// Nodes on one axis; the vertical axis uses the same layout. Global node
/// index j < per_axis() lives on the horizontal axis, j - per_axis() on the
/// vertical one.
struct BoundaryGrid {
    double x_max = 1.0;
    int nodes_per_panel = 0;
    std::vector<Panel> panels;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<int> panel_of;

    std::size_t per_axis() const { return nodes.size(); }
    std::size_t total() const { return 2 * nodes.size(); }

    BoundaryPoint point(std::size_t j) const {
        const std::size_t n = per_axis();
        return j < n ? BoundaryPoint{Axis::horizontal, nodes[j]}
                     : BoundaryPoint{Axis::vertical, nodes[j - n]};
    }
    double weight(std::size_t j) const { return weights[j % per_axis()]; }
};

struct GridOptions {
    int panels_per_axis = 12;
    int nodes_per_panel = 10;
    /// Relative to sup|alpha sigma|.
    double truncation_threshold = 1e-10;
};

/// Panels cover [0, X_max]: about half of them uniform, the first uniform
/// cell split geometrically (ratio 2) toward the corner.
inline BoundaryGrid build_grid(const BoundaryPotential& pot, int panels_per_axis, int nodes_per_panel,
                               double truncation_threshold = 1e-10) {
    if (panels_per_axis < 1) throw ValidationError("panels_per_axis must be at least 1");
    if (nodes_per_panel < 2) throw ValidationError("nodes_per_panel must be at least 2");
    if (!(truncation_threshold > 0.0)) throw ValidationError("truncation_threshold must be positive");

    BoundaryGrid grid;
    const double sup = pot.sup_abs();
    double x_max = sup > 0.0 ? support_radius(pot, truncation_threshold * sup) : 0.0;
    if (!(x_max > 0.0)) x_max = 1.0;
    grid.x_max = x_max;
    grid.nodes_per_panel = nodes_per_panel;

    const int uniform = (panels_per_axis + 1) / 2;
    const int graded = panels_per_axis - uniform + 1;
    const double cell = x_max / uniform;
    // graded pieces of the first cell: [0, c/2^(g-1)], ..., [c/4, c/2], [c/2, c]
    double lo = 0.0;
    for (int g = graded - 1; g >= 0; --g) {
        const double hi = cell / std::ldexp(1.0, g);
        grid.panels.push_back({lo, hi});
        lo = hi;
    }
    for (int u = 1; u < uniform; ++u) grid.panels.push_back({u * cell, u == uniform - 1 ? x_max : (u + 1) * cell});

    const GaussRule& rule = gauss_legendre(nodes_per_panel);
    for (std::size_t p = 0; p < grid.panels.size(); ++p) {
        const Panel& pan = grid.panels[p];
        for (int q = 0; q < nodes_per_panel; ++q) {
            grid.nodes.push_back(pan.center() + pan.half_length() * rule.nodes[q]);
            grid.weights.push_back(pan.half_length() * rule.weights[q]);
            grid.panel_of.push_back(int(p));
        }
    }
    return grid;
}

inline BoundaryGrid build_grid(const BoundaryPotential& pot, const GridOptions& opt = {}) {
    return build_grid(pot, opt.panels_per_axis, opt.nodes_per_panel, opt.truncation_threshold);
}

namespace detail {

/// Segment P(s) = c + s d, s in [-1, 1], in the plane.
struct Segment {
    double c1, c2;
    double d1, d2;
    double half_length() const { return std::hypot(d1, d2); }
};

inline constexpr double far_factor = 1.0;
inline constexpr int refinement_order = 16;

/// Adds factor * int_{-1}^{1} G(|x - P(s)|) l_j(s) |d| ds to out[j].
inline void near_segment_weights(const Wavenumber& k, PlanePoint x, const Segment& seg, const GaussRule& rule,
                                 cplx factor, cplx* out) {
    const double h = seg.half_length();
    const double dd = seg.d1 * seg.d1 + seg.d2 * seg.d2;
    const double s_star = std::clamp(((x.x1 - seg.c1) * seg.d1 + (x.x2 - seg.c2) * seg.d2) / dd, -1.0, 1.0);
    const double dist = std::hypot(x.x1 - seg.c1 - s_star * seg.d1, x.x2 - seg.c2 - s_star * seg.d2);
    const double start = std::max(dist / h, 1e-15);
    const GaussRule& fine = gauss_legendre(refinement_order);
    std::vector<double> basis;
    const std::size_t q = rule.nodes.size();

    auto piece = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int m = 0; m < refinement_order; ++m) {
            const double s = mid + half * fine.nodes[m];
            const double r = std::hypot(x.x1 - seg.c1 - s * seg.d1, x.x2 - seg.c2 - s * seg.d2);
            if (r == 0.0) continue;
            const cplx g = green_free(k, r) * (factor * (half * fine.weights[m] * h));
            lagrange_basis(rule, s, basis);
            for (std::size_t j = 0; j < q; ++j) out[j] += g * basis[j];
        }
    };
    for (int dir : {-1, 1}) {
        const double end = dir > 0 ? 1.0 : -1.0;
        double a = s_star, width = start;
        while (dir * (end - a) > 0.0) {
            const double b = dir > 0 ? std::min(a + width, end) : std::max(a - width, end);
            piece(std::min(a, b), std::max(a, b));
            a = b;
            width *= 2.0;
        }
    }
}

/// Product rule for a target sitting on node i of a straight segment.
inline void self_segment_weights(const Wavenumber& k, const GaussRule& rule, std::size_t i, double h,
                                 cplx factor, cplx* out) {
    const std::size_t q = rule.nodes.size();
    const double t = rule.nodes[i];
    const std::vector<double> mu = log_moments(int(q), t);
    const cplx scale = k.bessel_scale();
    const cplx log_scale = std::log(scale);
    constexpr double inv2pi = 1.0 / (2.0 * std::numbers::pi);
    std::vector<double> pn;
    for (std::size_t j = 0; j < q; ++j) {
        const double r = h * std::fabs(rule.nodes[j] - t);
        const auto split = specfun::k0_log_split(scale * r);
        // G = A ln r + S with A = -I0/(2pi), S = (R - I0 ln(-ik))/(2pi)
        const cplx a = split.log_coefficient * inv2pi;
        const cplx s = (split.smooth_remainder + split.log_coefficient * log_scale) * inv2pi;
        legendre_values(int(q), rule.nodes[j], pn);
        double log_weight = 0.0;
        for (std::size_t n = 0; n < q; ++n) log_weight += 0.5 * (2.0 * n + 1.0) * rule.weights[j] * pn[n] * mu[n];
        out[j] += factor * h * (a * (std::log(h) * rule.weights[j] + log_weight) + s * rule.weights[j]);
    }
}

/// Adds factor * int_seg G(|x - y|) l_j(y) dy to out[j], choosing the rule.
/// self_node >= 0 marks x as that node of the segment.
inline void segment_weights(const Wavenumber& k, PlanePoint x, const Segment& seg, const GaussRule& rule,
                            int self_node, cplx factor, cplx* out) {
    const double h = seg.half_length();
    const std::size_t q = rule.nodes.size();
    if (self_node >= 0 && std::abs(k.value()) * 2.0 * h <= specfun::default_split_radius) {
        self_segment_weights(k, rule, std::size_t(self_node), h, factor, out);
        return;
    }
    const double dd = seg.d1 * seg.d1 + seg.d2 * seg.d2;
    const double s_star = std::clamp(((x.x1 - seg.c1) * seg.d1 + (x.x2 - seg.c2) * seg.d2) / dd, -1.0, 1.0);
    const double dist = std::hypot(x.x1 - seg.c1 - s_star * seg.d1, x.x2 - seg.c2 - s_star * seg.d2);
    if (self_node < 0 && dist >= far_factor * 2.0 * h) {
        for (std::size_t j = 0; j < q; ++j) {
            const double s = rule.nodes[j];
            const double r = std::hypot(x.x1 - seg.c1 - s * seg.d1, x.x2 - seg.c2 - s * seg.d2);
            out[j] += factor * green_free(k, r) * (h * rule.weights[j]);
        }
        return;
    }
    near_segment_weights(k, x, seg, rule, factor, out);
}

} // namespace detail

/// Row of single-layer weights: int_{boundary} G0(k)(x, y) rho(y) dy is
/// approximated by sum_j W_j rho_j. Pass the node index when x is a grid node.
inline void layer_weights(const Wavenumber& k, const BoundaryGrid& grid, PlanePoint x, std::optional<std::size_t> node,
                          cplx* out) {
    const std::size_t n = grid.per_axis();
    const std::size_t q = std::size_t(grid.nodes_per_panel);
    const GaussRule& rule = gauss_legendre(grid.nodes_per_panel);
    std::fill(out, out + grid.total(), cplx(0.0));
    for (int axis = 0; axis < 2; ++axis) {
        for (std::size_t p = 0; p < grid.panels.size(); ++p) {
            const Panel& pan = grid.panels[p];
            cplx* dst = out + axis * n + p * q;
            int self = -1;
            if (node && *node / n == std::size_t(axis) && std::size_t(grid.panel_of[*node % n]) == p)
                self = int(*node % n - p * q);
            const double c = pan.center(), h = pan.half_length();
            // the panel and its mirror image across the corner, each counted twice
            const detail::Segment direct = axis == 0 ? detail::Segment{c, 0.0, h, 0.0} : detail::Segment{0.0, c, 0.0, h};
            const detail::Segment mirror =
                axis == 0 ? detail::Segment{-c, 0.0, -h, 0.0} : detail::Segment{0.0, -c, 0.0, -h};
            detail::segment_weights(k, x, direct, rule, self, 2.0, dst);
            detail::segment_weights(k, x, mirror, rule, -1, 2.0, dst);
        }
    }
}

inline std::vector<cplx> layer_weights(const Wavenumber& k, const BoundaryGrid& grid, PlanePoint x) {
    std::vector<cplx> w(grid.total());
    layer_weights(k, grid, x, std::nullopt, w.data());
    return w;
}

/// Node values of alpha*sigma, sqrt|sigma| and sgn(sigma) sqrt|sigma|.
struct NodeSigma {
    std::vector<double> sigma;
    std::vector<double> root;
    std::vector<double> signed_root;
    bool all_zero = true;
};

inline NodeSigma node_sigma(const BoundaryGrid& grid, const BoundaryPotential& pot) {
    NodeSigma ns;
    const std::size_t n = grid.total();
    ns.sigma.resize(n);
    ns.root.resize(n);
    ns.signed_root.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = pot(grid.point(j).coordinate);
        ns.sigma[j] = s;
        ns.root[j] = std::sqrt(std::fabs(s));
        ns.signed_root[j] = sign_of(s) * ns.root[j];
        if (s != 0.0) ns.all_zero = false;
    }
    return ns;
}

/// Dense matrix of 1 + B(k) on a grid, with lazily computed LU and smallest
/// singular value. Immutable after assembly apart from those caches.
class KernelMatrix {
public:
    static constexpr double condition_limit = 1e12;
    static constexpr double residual_tolerance = 1e-10;

    KernelMatrix(Wavenumber k, BoundaryGrid grid, Eigen::MatrixXcd entries, bool identity)
        : k_(k), grid_(std::move(grid)), entries_(std::move(entries)), identity_(identity) {
        // D^{1/2} M D^{-1/2} with D the quadrature weights: the L2-consistent
        // form used for factorization, conditioning and singular values.
        const Eigen::Index n = entries_.rows();
        root_weights_.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) root_weights_(j) = std::sqrt(grid_.weight(std::size_t(j)));
        if (!identity_)
            scaled_ = root_weights_.asDiagonal() * entries_ * root_weights_.cwiseInverse().asDiagonal();
    }

    const Wavenumber& k() const { return k_; }
    const BoundaryGrid& grid() const { return grid_; }
    const Eigen::MatrixXcd& entries() const { return entries_; }
    bool is_identity() const { return identity_; }

    /// Reciprocal-condition based estimate of the 1-norm condition number.
    double condition_estimate() const {
        if (identity_) return 1.0;
        const double rc = lu().rcond();
        return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    }

    /// Solves (1+B)h = rhs; throws NearSingularError above the condition limit.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
        if (rhs.size() != entries_.rows()) throw ValidationError("solve: rhs length does not match the grid");
        if (identity_) return rhs;
        const double cond = condition_estimate();
        if (cond > condition_limit) {
            std::ostringstream msg;
            msg << "1+B(k) is near-singular at k = " << k_.value() << " (condition ~ " << cond
                << "): possible point of the exceptional set or bound state";
            throw NearSingularError(msg.str(), cond);
        }
        const double scale = rhs.norm();
        Eigen::VectorXcd h = scaled_solve(rhs);
        if (scale == 0.0) return h;
        for (int pass = 0; pass < 3; ++pass) {
            const Eigen::VectorXcd r = rhs - entries_ * h;
            if (r.norm() <= residual_tolerance * scale) return h;
            h += scaled_solve(r);
        }
        std::ostringstream msg;
        msg << "solve: residual above " << residual_tolerance << " after refinement at k = " << k_.value();
        throw NumericalError(msg.str());
    }

    double min_singular_value() const {
        if (identity_) return 1.0;
        if (!smin_) {
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(scaled_);
            smin_ = svd.singularValues().minCoeff();
        }
        return *smin_;
    }

    /// Sign of Re det(1+B); meaningful when the matrix is real (k = i kappa).
    int determinant_sign() const {
        if (identity_) return 1;
        const auto& f = lu();
        double phase = 0.0;
        const auto& u = f.matrixLU();
        for (Eigen::Index i = 0; i < u.rows(); ++i) phase += std::arg(u(i, i));
        const double perm = f.permutationP().determinant();
        return std::cos(phase) * perm >= 0.0 ? 1 : -1;
    }

    /// smin carrying the sign of det(1+B): changes sign across a simple
    /// zero of the matrix on the imaginary axis.
    double signed_min_singular_value() const { return determinant_sign() * min_singular_value(); }

private:
    const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu() const {
        std::call_once(*lu_once_, [this] { lu_.emplace(scaled_); });
        return *lu_;
    }

    Eigen::VectorXcd scaled_solve(const Eigen::VectorXcd& rhs) const {
        const Eigen::VectorXcd y = lu().solve((root_weights_.array() * rhs.array()).matrix());
        return (y.array() / root_weights_.array()).matrix();
    }

    Wavenumber k_;
    BoundaryGrid grid_;
    Eigen::MatrixXcd entries_;
    bool identity_;
    Eigen::VectorXd root_weights_;
    Eigen::MatrixXcd scaled_;
    mutable std::optional<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
    mutable std::unique_ptr<std::once_flag> lu_once_ = std::make_unique<std::once_flag>();
    mutable std::optional<double> smin_;
};

/// Single-layer weight matrix W with W_ij = int G0(x_i, y) l_j(y) dy. Rows
/// whose target carries no potential are skipped (left zero) when mask is given.
inline Eigen::MatrixXcd single_layer_matrix(const Wavenumber& k, const BoundaryGrid& grid,
                                            const std::vector<double>* row_mask = nullptr) {
    const std::size_t n = grid.total();
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(Eigen::Index(n), Eigen::Index(n));
    std::vector<std::vector<cplx>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        if (row_mask && (*row_mask)[i] == 0.0) return;
        rows[i].resize(n);
        try {
            layer_weights(k, grid, grid.point(i).embed(), i, rows[i].data());
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "assemble: kernel evaluation failed at node " << i << ": " << e.what();
            throw NumericalError(msg.str());
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        if (!rows[i].empty())
            for (std::size_t j = 0; j < n; ++j) w(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
    return w;
}

/// M = 1 + B(k) with M_ij = delta_ij - sqrt|sigma_i| W_ij sgn(sigma_j) sqrt|sigma_j|.
inline KernelMatrix assemble(const Wavenumber& k, const BoundaryGrid& grid, const BoundaryPotential& pot) {
    const std::size_t n = grid.total();
    const NodeSigma ns = node_sigma(grid, pot);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(Eigen::Index(n), Eigen::Index(n));
    if (ns.all_zero) return KernelMatrix(k, grid, std::move(m), true);
    const Eigen::MatrixXcd w = single_layer_matrix(k, grid, &ns.root);
    for (std::size_t i = 0; i < n; ++i) {
        if (ns.root[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j)
            m(Eigen::Index(i), Eigen::Index(j)) -= ns.root[i] * w(Eigen::Index(i), Eigen::Index(j)) * ns.signed_root[j];
    }
    return KernelMatrix(k, grid, std::move(m), false);
}

inline Eigen::VectorXcd solve(const KernelMatrix& mat, const Eigen::VectorXcd& rhs) { return mat.solve(rhs); }

inline double min_singular_value(const KernelMatrix& mat) { return mat.min_singular_value(); }

/// B(k) applied to a node density without storing the matrix.
inline Eigen::VectorXcd apply_B(const Wavenumber& k, const BoundaryGrid& grid, const BoundaryPotential& pot,
                                const Eigen::VectorXcd& density) {
    const std::size_t n = grid.total();
    if (std::size_t(density.size()) != n) throw ValidationError("apply_B: density length does not match the grid");
    const NodeSigma ns = node_sigma(grid, pot);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index(n));
    if (ns.all_zero) return out;
    Eigen::VectorXcd weighted = Eigen::VectorXcd::Zero(Eigen::Index(n));
    for (std::size_t j = 0; j < n; ++j) weighted(Eigen::Index(j)) = ns.signed_root[j] * density(Eigen::Index(j));
    parallel_for(n, [&](std::size_t i) {
        if (ns.root[i] == 0.0) return;
        std::vector<cplx> row(n);
        layer_weights(k, grid, grid.point(i).embed(), i, row.data());
        cplx acc(0.0);
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * weighted(Eigen::Index(j));
        out(Eigen::Index(i)) = -ns.root[i] * acc;
    });
    return out;
}

} // namespace quarterwave

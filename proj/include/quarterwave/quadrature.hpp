#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace quarterwave {

struct GaussRule {
    std::vector<double> nodes;   // ascending on [-1, 1]
    std::vector<double> weights;
    std::vector<double> barycentric; // Lagrange barycentric weights for the nodes
};

namespace detail {

inline GaussRule make_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Tricomi initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    rule.barycentric.resize(n);
    // For Gauss nodes, w_j ~ (-1)^j sqrt((1 - x_j^2) weight_j)
    for (int j = 0; j < n; ++j)
        rule.barycentric[j] =
            ((j % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - rule.nodes[j] * rule.nodes[j]) * rule.weights[j]);
    return rule;
}

} // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]; cached, thread-safe.
inline const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::make_gauss_rule(n)).first;
    return it->second;
}

/// Values of all Lagrange basis polynomials of the rule at s.
inline void lagrange_basis(const GaussRule& rule, double s, std::vector<double>& out) {
    const std::size_t n = rule.nodes.size();
    out.assign(n, 0.0);
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = s - rule.nodes[j];
        if (d == 0.0) {
            out[j] = 1.0;
            return;
        }
        out[j] = rule.barycentric[j] / d;
        denom += out[j];
    }
    for (auto& v : out) v /= denom;
}

/// Legendre polynomials P_0..P_{n-1} at s.
inline void legendre_values(int n, double s, std::vector<double>& out) {
    out.assign(n, 0.0);
    out[0] = 1.0;
    if (n > 1) out[1] = s;
    for (int m = 1; m + 1 < n; ++m) out[m + 1] = ((2.0 * m + 1.0) * s * out[m] - m * out[m - 1]) / (m + 1.0);
}

/// Log moments mu_n(t) = int_{-1}^{1} ln|s - t| P_n(s) ds, n < count, for |t| < 1.
inline std::vector<double> log_moments(int count, double t) {
    // mu_n = (q_{n+1} - q_{n-1}) / (2n+1) with q_m = 2 Q_m(t), Q_m Legendre of the second kind
    std::vector<double> q(count + 1);
    q[0] = std::log((1.0 + t) / (1.0 - t));
    if (count >= 1) q[1] = t * q[0] - 2.0;
    for (int m = 1; m < count; ++m) q[m + 1] = ((2.0 * m + 1.0) * t * q[m] - m * q[m - 1]) / (m + 1.0);
    std::vector<double> mu(count);
    mu[0] = (1.0 + t) * std::log1p(t) + (1.0 - t) * std::log1p(-t) - 2.0;
    for (int n = 1; n < count; ++n) mu[n] = (q[n + 1] - q[n - 1]) / (2.0 * n + 1.0);
    return mu;
}

} // namespace quarterwave

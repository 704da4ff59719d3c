#pragma once

// Boundary potential sigma on the half-line, identical on both boundary
// axes of the quarter plane, together with the coupling alpha
// (sigma_alpha = alpha * sigma) and its declared decay exponent eps,
// sigma(x) = O(x^{-1-eps}).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace quarterwave {

struct StepShape {
    double sigma0;
    double length;
};

struct ExponentialShape {
    double sigma0;
    double mu;
};

struct TableShape {
    std::vector<double> x;
    std::vector<double> sigma;
};

using PotentialShape = std::variant<StepShape, ExponentialShape, TableShape>;

class BoundaryPotential {
public:
    static BoundaryPotential step(double sigma0, double length, double alpha = 1.0,
                                  double epsilon = 1.0) {
        if (!(length > 0.0) || !std::isfinite(length))
            throw ValidationError("L must be positive");
        return BoundaryPotential(StepShape{sigma0, length}, alpha, epsilon);
    }

    static BoundaryPotential exponential(double sigma0, double mu, double alpha = 1.0,
                                         double epsilon = 1.0) {
        if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be positive");
        return BoundaryPotential(ExponentialShape{sigma0, mu}, alpha, epsilon);
    }

    static BoundaryPotential table(std::vector<std::pair<double, double>> points,
                                   double alpha = 1.0, double epsilon = 1.0) {
        if (points.empty()) throw ValidationError("points must not be empty");
        TableShape t;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto [x, s] = points[i];
            if (!std::isfinite(x) || !std::isfinite(s))
                throw ValidationError("points: entries must be finite");
            if (x < 0.0) throw ValidationError("points: abscissae must be non-negative");
            if (i > 0 && !(x > t.x.back()))
                throw ValidationError("points: abscissae must be strictly increasing");
            t.x.push_back(x);
            t.sigma.push_back(s);
        }
        return BoundaryPotential(std::move(t), alpha, epsilon);
    }

    /// Unscaled profile sigma(x) (alpha not applied).
    double profile(double x) const {
        if (x < 0.0 || std::isnan(x)) throw std::domain_error("potential: x must be non-negative");
        return std::visit(
            [x](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, StepShape>) {
                    return x <= s.length ? s.sigma0 : 0.0;
                } else if constexpr (std::is_same_v<S, ExponentialShape>) {
                    return s.sigma0 * std::exp(-s.mu * x);
                } else {
                    if (x > s.x.back()) return 0.0;
                    if (x <= s.x.front()) return s.sigma.front();
                    const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
                    const std::size_t i = std::size_t(it - s.x.begin()) - 1;
                    const double w = (x - s.x[i]) / (s.x[i + 1] - s.x[i]);
                    return (1.0 - w) * s.sigma[i] + w * s.sigma[i + 1];
                }
            },
            shape_);
    }

    /// alpha * sigma(x).
    double operator()(double x) const { return alpha_ == 0.0 ? 0.0 : alpha_ * profile(x); }

    double alpha() const noexcept { return alpha_; }
    double decay_epsilon() const noexcept { return epsilon_; }
    /// max_i |sigma(x_i)| x_i^{1+eps} over table samples; 0 for analytic shapes.
    double decay_constant() const noexcept { return decay_constant_; }
    const PotentialShape& shape() const noexcept { return shape_; }

    BoundaryPotential with_alpha(double alpha) const {
        return BoundaryPotential(shape_, alpha, epsilon_);
    }

    /// sup |alpha sigma|.
    double sup_abs() const {
        const double s = std::visit(
            [](const auto& sh) -> double {
                using S = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<S, TableShape>) {
                    double m = 0.0;
                    for (double v : sh.sigma) m = std::max(m, std::fabs(v));
                    return m;
                } else {
                    return std::fabs(sh.sigma0);
                }
            },
            shape_);
        return std::fabs(alpha_) * s;
    }

    /// Points where sigma is not smooth (step edge, table samples).
    std::vector<double> breakpoints() const {
        if (const auto* s = std::get_if<StepShape>(&shape_)) return {s->length};
        if (const auto* t = std::get_if<TableShape>(&shape_)) return t->x;
        return {};
    }

    /// Exact integral of the unscaled profile over [a, b], 0 <= a <= b.
    double profile_integral(double a, double b) const {
        return std::visit(
            [a, b](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, StepShape>) {
                    return s.sigma0 * std::max(0.0, std::min(b, s.length) - a);
                } else if constexpr (std::is_same_v<S, ExponentialShape>) {
                    return s.sigma0 / s.mu * (std::exp(-s.mu * a) - std::exp(-s.mu * b));
                } else {
                    // piecewise linear, constant sigma.front() on [0, x0], 0 past the end
                    double total = 0.0;
                    const double x0 = s.x.front();
                    if (a < x0) total += s.sigma.front() * (std::min(b, x0) - a);
                    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
                        const double lo = std::max(a, s.x[i]);
                        const double hi = std::min(b, s.x[i + 1]);
                        if (hi <= lo) continue;
                        const double span = s.x[i + 1] - s.x[i];
                        auto f = [&](double x) {
                            const double w = (x - s.x[i]) / span;
                            return (1.0 - w) * s.sigma[i] + w * s.sigma[i + 1];
                        };
                        total += 0.5 * (f(lo) + f(hi)) * (hi - lo);
                    }
                    return total;
                }
            },
            shape_);
    }

private:
    BoundaryPotential(PotentialShape shape, double alpha, double epsilon)
        : shape_(std::move(shape)), alpha_(alpha), epsilon_(epsilon) {
        if (!(alpha >= 0.0) || !std::isfinite(alpha))
            throw ValidationError("alpha must be non-negative");
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
            throw ValidationError("epsilon must be non-negative");
        std::visit(
            [](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (!std::is_same_v<S, TableShape>) {
                    if (!std::isfinite(s.sigma0)) throw ValidationError("sigma0 must be finite");
                }
            },
            shape_);
        if (const auto* t = std::get_if<TableShape>(&shape_)) {
            for (std::size_t i = 0; i < t->x.size(); ++i)
                decay_constant_ = std::max(decay_constant_, std::fabs(t->sigma[i]) *
                                                                std::pow(t->x[i], 1.0 + epsilon_));
        }
    }

    PotentialShape shape_;
    double alpha_;
    double epsilon_;
    double decay_constant_ = 0.0;
};

inline double eval(const BoundaryPotential& pot, double x) { return pot(x); }

/// Smallest X with |alpha sigma(x)| < threshold for every x > X.
inline double support_radius(const BoundaryPotential& pot, double threshold) {
    if (!(threshold > 0.0)) throw ValidationError("threshold must be positive");
    const double a = std::fabs(pot.alpha());
    if (a == 0.0) return 0.0;
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, StepShape>) {
                return a * std::fabs(s.sigma0) >= threshold ? s.length : 0.0;
            } else if constexpr (std::is_same_v<S, ExponentialShape>) {
                const double peak = a * std::fabs(s.sigma0);
                return peak >= threshold ? std::log(peak / threshold) / s.mu : 0.0;
            } else {
                // scan segments from the far end for the last point at or above threshold
                const std::size_t n = s.x.size();
                if (a * std::fabs(s.sigma[n - 1]) >= threshold) return s.x[n - 1];
                for (std::size_t i = n - 1; i-- > 0;) {
                    const double lo = a * std::fabs(s.sigma[i]);
                    if (lo < threshold) {
                        // |.| of a linear function is convex; check the interior peak only
                        // when the segment crosses zero, otherwise both ends decide.
                        continue;
                    }
                    // sigma_i above, sigma_{i+1} below: find crossing on the segment
                    const double s0 = a * s.sigma[i], s1 = a * s.sigma[i + 1];
                    const double target = s0 > 0.0 ? threshold : -threshold;
                    const double w = (target - s0) / (s1 - s0);
                    return s.x[i] + std::clamp(w, 0.0, 1.0) * (s.x[i + 1] - s.x[i]);
                }
                return 0.0;
            }
        },
        pot.shape());
}

/// Parses the JSON configuration
///   {"shape": "step"|"exponential"|"table", "sigma0", "L", "mu",
///    "points": [[x, sigma], ...], "alpha" (default 1), "epsilon" (default 1)}
/// Unknown fields are rejected.
inline BoundaryPotential from_config(std::string_view document) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed document: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config: top level must be an object");

    auto number = [&](const char* key, double fallback, bool required) -> double {
        if (!doc.contains(key)) {
            if (required) throw ValidationError(std::string("config: missing field '") + key + "'");
            return fallback;
        }
        const auto& v = doc.at(key);
        if (!v.is_number()) throw ValidationError(std::string("config: field '") + key + "' must be a number");
        return v.get<double>();
    };

    if (!doc.contains("shape") || !doc.at("shape").is_string())
        throw ValidationError("config: field 'shape' must be one of step, exponential, table");
    const std::string shape = doc.at("shape").get<std::string>();

    std::vector<std::string> allowed{"shape", "alpha", "epsilon"};
    if (shape == "step") allowed.insert(allowed.end(), {"sigma0", "L"});
    else if (shape == "exponential") allowed.insert(allowed.end(), {"sigma0", "mu"});
    else if (shape == "table") allowed.push_back("points");
    else throw ValidationError("config: field 'shape' must be one of step, exponential, table");

    for (const auto& item : doc.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ValidationError("config: unknown field '" + item.key() + "' for shape " + shape);

    const double alpha = number("alpha", 1.0, false);
    const double epsilon = number("epsilon", 1.0, false);
    if (alpha < 0.0) throw ValidationError("alpha must be non-negative");
    if (epsilon < 0.0) throw ValidationError("epsilon must be non-negative");

    if (shape == "step") {
        const double l = number("L", 0.0, true);
        if (!(l > 0.0)) throw ValidationError("L must be positive");
        return BoundaryPotential::step(number("sigma0", 0.0, true), l, alpha, epsilon);
    }
    if (shape == "exponential") {
        const double mu = number("mu", 0.0, true);
        if (!(mu > 0.0)) throw ValidationError("mu must be positive");
        return BoundaryPotential::exponential(number("sigma0", 0.0, true), mu, alpha, epsilon);
    }
    if (!doc.contains("points") || !doc.at("points").is_array())
        throw ValidationError("config: field 'points' must be an array of [x, sigma] pairs");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : doc.at("points")) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ValidationError("config: field 'points' must be an array of [x, sigma] pairs");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return BoundaryPotential::table(std::move(pts), alpha, epsilon);
}

/// Inverse of from_config.
inline std::string to_config(const BoundaryPotential& pot) {
    nlohmann::json doc;
    std::visit(
        [&doc](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, StepShape>) {
                doc["shape"] = "step";
                doc["sigma0"] = s.sigma0;
                doc["L"] = s.length;
            } else if constexpr (std::is_same_v<S, ExponentialShape>) {
                doc["shape"] = "exponential";
                doc["sigma0"] = s.sigma0;
                doc["mu"] = s.mu;
            } else {
                doc["shape"] = "table";
                auto pts = nlohmann::json::array();
                for (std::size_t i = 0; i < s.x.size(); ++i) pts.push_back({s.x[i], s.sigma[i]});
                doc["points"] = pts;
            }
        },
        pot.shape());
    doc["alpha"] = pot.alpha();
    doc["epsilon"] = pot.decay_epsilon();
    return doc.dump();
}

} // namespace quarterwave

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <utility>

#include "spiked/errors.hpp"

namespace spiked {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
template <typename Scalar = double>
void gauss_legendre(int n, Vector<Scalar>& nodes, Vector<Scalar>& weights) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    nodes.resize(n);
    weights.resize(n);
    const long double pi = std::numbers::pi_v<long double>;
    auto legendre = [n](long double x, long double& p, long double& dp) {
        long double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        p = p1;
        dp = n * (x * p1 - p0) / (x * x - 1);
    };
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        long double p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre(x, p, dp);
            long double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        legendre(x, p, dp);
        long double w = 2 / ((1 - x * x) * dp * dp);
        nodes(i) = static_cast<Scalar>(-x);
        nodes(n - 1 - i) = static_cast<Scalar>(x);
        weights(i) = weights(n - 1 - i) = static_cast<Scalar>(w);
    }
}

// Cached double-precision Gauss-Legendre rule on [-1, 1]; safe for concurrent use.
const std::pair<Eigen::VectorXd, Eigen::VectorXd>& cached_gauss_legendre(int n);

struct DomainMap {
    enum class Kind { Interval, SemiInfinite };
    Kind kind = Kind::Interval;
    double lo = -1;
    double hi = 1;     // unused for SemiInfinite
    double scale = 1;  // L in x + L(1-t)/(1+t)
};

// Nodes and weights for integrating over a real interval; nodes strictly increasing.
struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    DomainMap map;

    int size() const { return static_cast<int>(nodes.size()); }
    template <typename F>
    double integrate(F&& f) const {
        double s = 0;
        for (int i = 0; i < size(); ++i) s += weights(i) * f(nodes(i));
        return s;
    }
};

inline constexpr int min_rule_nodes = 4;

QuadratureRule interval_rule(double a, double b, int n);

// Integrates over (x, inf) through t -> x + L(1-t)/(1+t).
QuadratureRule semi_infinite_rule(double x, double scale, int n);

// Composite rule with equal panels on [a, b].
QuadratureRule composite_rule(double a, double b, int panels, int per_panel);

}  // namespace spiked

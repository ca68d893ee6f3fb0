#include "spiked/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace spiked {

const std::pair<Eigen::VectorXd, Eigen::VectorXd>& cached_gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<std::pair<Eigen::VectorXd, Eigen::VectorXd>>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<std::pair<Eigen::VectorXd, Eigen::VectorXd>>();
        gauss_legendre(n, slot->first, slot->second);
    }
    return *slot;
}

QuadratureRule interval_rule(double a, double b, int n) {
    if (!(b > a)) throw DomainError("interval_rule: empty interval");
    if (n < min_rule_nodes) throw DomainError("interval_rule: need at least 4 nodes");
    const auto& [t, w] = cached_gauss_legendre(n);
    QuadratureRule r;
    const double h = 0.5 * (b - a);
    r.nodes = (a + h) + h * t.array();
    r.weights = h * w;
    r.map = {DomainMap::Kind::Interval, a, b, 1.0};
    return r;
}

QuadratureRule semi_infinite_rule(double x, double scale, int n) {
    if (!(scale > 0)) throw DomainError("semi_infinite_rule: scale must be positive");
    if (n < min_rule_nodes) throw DomainError("semi_infinite_rule: need at least 4 nodes");
    const auto& [t, w] = cached_gauss_legendre(n);
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // t descending gives nodes ascending
    for (int i = 0; i < n; ++i) {
        const double ti = t(n - 1 - i);
        r.nodes(i) = x + scale * (1 - ti) / (1 + ti);
        r.weights(i) = w(n - 1 - i) * 2 * scale / ((1 + ti) * (1 + ti));
    }
    r.map = {DomainMap::Kind::SemiInfinite, x, 0.0, scale};
    return r;
}

QuadratureRule composite_rule(double a, double b, int panels, int per_panel) {
    if (!(b > a) || panels < 1 || per_panel < 1 || panels * per_panel < min_rule_nodes)
        throw DomainError("composite_rule: bad arguments");
    const auto& [t, w] = cached_gauss_legendre(per_panel);
    QuadratureRule r;
    r.nodes.resize(panels * per_panel);
    r.weights.resize(panels * per_panel);
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        for (int i = 0; i < per_panel; ++i) {
            r.nodes(p * per_panel + i) = lo + 0.5 * width * (1 + t(i));
            r.weights(p * per_panel + i) = 0.5 * width * w(i);
        }
    }
    r.map = {DomainMap::Kind::Interval, a, b, 1.0};
    return r;
}

}  // namespace spiked

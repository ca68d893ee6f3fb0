#include "spiked/spectral_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spiked/errors.hpp"

namespace spiked {

GoFReport ks_statistic(const EmpiricalDistribution& dist, const Cdf& cdf) {
    const std::vector<double>& x = dist.sorted;
    const std::size_t n = x.size();
    if (n == 0) throw DomainError("ks_statistic: empty sample");
    GoFReport r;
    r.n = n;
    r.law = dist.law;
    r.grid.reserve(n);
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n && x[i + 1] == x[i]) continue;
        double f;
        try {
            f = cdf(x[i]);
        } catch (const Error& e) {
            throw NumericalFailure(std::string("ks_statistic: law evaluation failed at x = ") +
                                   std::to_string(x[i]) + ": " + e.what());
        }
        // first index of the tie block
        std::size_t lo = i;
        while (lo > 0 && x[lo - 1] == x[i]) --lo;
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(lo) / n;
        d = std::max({d, above, below});
        r.grid.push_back({x[i], static_cast<double>(i + 1) / n, f});
    }
    r.ks = std::clamp(d, 0.0, 1.0);
    return r;
}

GoFReport ks_statistic(const EmpiricalDistribution& dist, const LawSpec& law) {
    GoFReport r = ks_statistic(dist, [&](double x) { return law_cdf(law, x); });
    r.law = law;
    return r;
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw DomainError("pearson_correlation: bad sizes");
    const Eigen::Map<const Eigen::VectorXd> x(a.data(), a.size()), y(b.data(), b.size());
    const Eigen::VectorXd xc = x.array() - x.mean(), yc = y.array() - y.mean();
    const double den = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
    return den > 0 ? std::clamp(xc.dot(yc) / den, -1.0, 1.0) : 0.0;
}

namespace {

std::vector<double> quantile_grid(const std::vector<double>& sorted, int count, double tail) {
    std::vector<double> q(count);
    const std::size_t n = sorted.size();
    for (int i = 0; i < count; ++i) {
        const double p = count == 1 ? 0.5 : tail + (1 - 2 * tail) * i / (count - 1);
        const auto idx = static_cast<std::size_t>(std::min<double>(std::floor(p * (n - 1)), n - 1.0));
        q[i] = sorted[idx];
    }
    return q;
}

// Number of grid points strictly below v, i.e. the first grid index with v <= grid[j].
int grid_bin(const std::vector<double>& grid, double v) {
    return static_cast<int>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
}

double defect_on_grid(const std::vector<int>& bx, const std::vector<int>& by, int g) {
    const std::size_t n = bx.size();
    // counts[a][b] = #{i : bx_i <= a, by_i <= b}, built from a 2D histogram
    std::vector<double> h((g + 1) * (g + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[bx[i] * (g + 1) + by[i]] += 1;
    std::vector<double> c((g + 1) * (g + 1), 0.0);
    for (int a = 0; a <= g; ++a) {
        double row = 0;
        for (int b = 0; b <= g; ++b) {
            row += h[a * (g + 1) + b];
            c[a * (g + 1) + b] = row + (a > 0 ? c[(a - 1) * (g + 1) + b] : 0.0);
        }
    }
    std::vector<double> mx(g, 0.0), my(g, 0.0);
    for (int a = 0; a < g; ++a) mx[a] = c[a * (g + 1) + g] / n;
    for (int b = 0; b < g; ++b) my[b] = c[g * (g + 1) + b] / n;
    double d = 0;
    for (int a = 0; a < g; ++a)
        for (int b = 0; b < g; ++b) d = std::max(d, std::abs(c[a * (g + 1) + b] / n - mx[a] * my[b]));
    return d;
}

void check_paired(const EmpiricalDistribution& dmin, const EmpiricalDistribution& dmax) {
    if (dmin.replicates != dmax.replicates) throw UnpairedSamplesError("independence: samples are not paired");
    if (dmin.size() < 2) throw DomainError("independence: need at least two pairs");
}

}  // namespace

IndependenceReport independence_defect(const EmpiricalDistribution& dmin, const EmpiricalDistribution& dmax,
                                       int grid_per_axis) {
    check_paired(dmin, dmax);
    IndependenceReport r;
    r.grid_per_axis = grid_per_axis;
    const std::vector<double> gx = quantile_grid(dmin.sorted, grid_per_axis, r.tail_fraction);
    const std::vector<double> gy = quantile_grid(dmax.sorted, grid_per_axis, r.tail_fraction);
    std::vector<int> bx(dmin.size()), by(dmin.size());
    for (std::size_t i = 0; i < dmin.size(); ++i) {
        bx[i] = grid_bin(gx, dmin.samples[i]);
        by[i] = grid_bin(gy, dmax.samples[i]);
    }
    r.defect = std::clamp(defect_on_grid(bx, by, grid_per_axis), 0.0, 1.0);
    r.correlation = pearson_correlation(dmin.samples, dmax.samples);
    return r;
}

double independence_envelope(const EmpiricalDistribution& dmin, const EmpiricalDistribution& dmax, int shuffles,
                             double level, std::uint64_t seed, int grid_per_axis) {
    check_paired(dmin, dmax);
    if (shuffles < 1 || !(level > 0 && level < 1)) throw DomainError("independence_envelope: bad arguments");
    const double tail = IndependenceReport{}.tail_fraction;
    const std::vector<double> gx = quantile_grid(dmin.sorted, grid_per_axis, tail);
    const std::vector<double> gy = quantile_grid(dmax.sorted, grid_per_axis, tail);
    std::vector<int> bx(dmin.size()), by(dmin.size());
    for (std::size_t i = 0; i < dmin.size(); ++i) {
        bx[i] = grid_bin(gx, dmin.samples[i]);
        by[i] = grid_bin(gy, dmax.samples[i]);
    }
    std::mt19937_64 rng(seed);
    std::vector<double> defects(shuffles);
    for (int s = 0; s < shuffles; ++s) {
        std::shuffle(by.begin(), by.end(), rng);
        defects[s] = defect_on_grid(bx, by, grid_per_axis);
    }
    std::sort(defects.begin(), defects.end());
    const auto idx = static_cast<std::size_t>(std::ceil(level * shuffles)) - 1;
    return defects[std::min(idx, defects.size() - 1)];
}

CompositeLaw condition_number_law(const SpikedModel& model) {
    const Regime regime = classify(model);
    const LawSpec lmin = scaling_for(model, Side::Min), lmax = scaling_for(model, Side::Max);
    CompositeLaw c;
    c.regime = regime.quadrant();
    const bool use_x = c.regime == 1 || c.regime == 2 || c.regime == 4;
    const bool use_y = c.regime == 1 || c.regime == 3 || c.regime == 4;
    if (use_x) {
        c.cx = lmin.scale / lmin.center;
        c.law_x = lmin;
    }
    if (use_y) {
        c.cy = lmax.scale / lmax.center;
        c.law_y = lmax;
    }
    return c;
}

ConditionNumberStat condition_number_stat(const std::vector<ExtremePair>& pairs, const SpikedModel& model) {
    ConditionNumberStat out;
    out.law = condition_number_law(model);
    const double mu_min = scaling_for(model, Side::Min).center, mu_max = scaling_for(model, Side::Max).center;
    const double alpha = out.law.regime == 1 ? 2.0 / 3.0 : 0.5;
    const double f = std::pow(static_cast<double>(model.M), alpha);
    out.statistic.reserve(pairs.size());
    for (const ExtremePair& p : pairs) {
        if (!(p.lambda_min > 0))
            throw DomainError("condition_number_stat: nonpositive lambda_min in replicate " +
                              std::to_string(p.replicate));
        const double kappa2 = p.lambda_max / p.lambda_min;
        out.statistic.push_back(f * (mu_min / mu_max * kappa2 - 1));
    }
    return out;
}

double condition_identity_rhs(const ExtremePair& pair, const SpikedModel& model) {
    const CompositeLaw law = condition_number_law(model);
    if (law.regime != 1) throw RegimeMismatchError("condition_identity_rhs: regime 1 only");
    const double smin = law.law_x->scaled(pair.lambda_min, model.M);
    const double smax = law.law_y->scaled(pair.lambda_max, model.M);
    return law.law_x->center / pair.lambda_min * (law.cx * smin + law.cy * smax);
}

std::vector<double> sample_composite(const CompositeLaw& law, int n, std::uint64_t seed) {
    std::optional<TabulatedLaw> tx, ty;
    if (law.law_x) tx.emplace(law.law_x->family, law.law_x->k);
    if (law.law_y) ty.emplace(law.law_y->family, law.law_y->k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&](const TabulatedLaw& t) {
        double u;
        do u = unif(rng);
        while (u <= 0.0);
        return t.quantile(u);
    };
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double v = 0;
        if (tx) v += law.cx * draw(*tx);
        if (ty) v += law.cy * draw(*ty);
        out[i] = v;
    }
    return out;
}

HypothesisResult hypothesis_test(double lambda_min, double lambda_max, const SpikedModel& model, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw DomainError("hypothesis_test: alpha must lie in (0, 1)");
    const LawSpec lmin = scaling_for(model, Side::Min), lmax = scaling_for(model, Side::Max);
    HypothesisResult r;
    r.scaled_min = lmin.scaled(lambda_min, model.M);
    r.scaled_max = lmax.scaled(lambda_max, model.M);
    r.T = (1 - law_cdf(lmin, r.scaled_min)) * (1 - law_cdf(lmax, r.scaled_max));
    r.reject = r.T <= alpha;
    return r;
}

}  // namespace spiked

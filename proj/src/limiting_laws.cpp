#include "spiked/limiting_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spiked/errors.hpp"
#include "spiked/fredholm.hpp"
#include "spiked/parallel.hpp"
#include "spiked/special_functions.hpp"

namespace spiked {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 1) || !std::isfinite(gamma)) throw DomainError("gamma must lie in (1, inf)");
}

std::vector<Spike> canonical(std::vector<Spike> spikes) {
    std::vector<Spike> out;
    for (const Spike& s : spikes) {
        if (!(s.value > 0) || !std::isfinite(s.value)) throw DomainError("spike values must be positive");
        if (s.multiplicity < 1) throw DomainError("spike multiplicity must be positive");
        if (s.value == 1.0) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const Spike& o) { return o.value == s.value; });
        if (it != out.end())
            it->multiplicity += s.multiplicity;
        else
            out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const Spike& a, const Spike& b) { return a.value > b.value; });
    return out;
}

bool at_threshold(double ell, double threshold) {
    return std::abs(ell - threshold) <= threshold_tolerance * std::max(1.0, std::abs(threshold));
}

double clamp_probability(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericalFailure(std::string(what) + ": non-finite value");
    if (v < 0) {
        if (v < -1e-8) throw NumericalFailure(std::string(what) + ": value below 0 beyond tolerance");
        return 0;
    }
    if (v > 1) {
        if (v > 1 + 1e-8) throw NumericalFailure(std::string(what) + ": value above 1 beyond tolerance");
        return 1;
    }
    return v;
}

}  // namespace

SpikedModel SpikedModel::from_dimensions(int N, int M, std::vector<Spike> spikes) {
    if (N < 1 || M <= N) throw DomainError("SpikedModel: require 1 <= N < M");
    SpikedModel m;
    m.N = N;
    m.M = M;
    m.gamma = std::sqrt(static_cast<double>(M) / N);
    m.spikes = canonical(std::move(spikes));
    if (m.spike_count() > N) throw DomainError("SpikedModel: spike multiplicities exceed N");
    return m;
}

SpikedModel SpikedModel::from_gamma(int N, double gamma, std::vector<Spike> spikes) {
    check_gamma(gamma);
    const int M = static_cast<int>(std::ceil(gamma * gamma * N - 1e-9));
    SpikedModel m = from_dimensions(N, M, std::move(spikes));
    m.gamma = gamma;
    return m;
}

int SpikedModel::spike_count() const {
    int c = 0;
    for (const Spike& s : spikes) c += s.multiplicity;
    return c;
}

std::vector<double> SpikedModel::population() const {
    std::vector<double> p;
    p.reserve(N);
    for (const Spike& s : spikes)
        for (int i = 0; i < s.multiplicity; ++i) p.push_back(s.value);
    while (static_cast<int>(p.size()) < N) p.push_back(1.0);
    std::sort(p.begin(), p.end(), std::greater<>());
    return p;
}

double SpikedModel::smallest() const { return population().back(); }
double SpikedModel::largest() const { return population().front(); }

int SpikedModel::multiplicity_of(double value) const {
    int c = 0;
    for (double v : population())
        if (v == value) ++c;
    return c;
}

int Regime::quadrant() const {
    const bool gmin = min_branch == Branch::Gaussian, gmax = max_branch == Branch::Gaussian;
    if (!gmin && !gmax) return 1;
    if (gmin && !gmax) return 2;
    if (!gmin && gmax) return 3;
    return 4;
}

Regime classify(const SpikedModel& model) {
    check_gamma(model.gamma);
    Regime r;
    const double lo = 1 - 1 / model.gamma, hi = 1 + 1 / model.gamma;
    const double lmin = model.smallest(), lmax = model.largest();
    if (at_threshold(lmin, lo)) {
        r.min_branch = Branch::TracyWidom;
        r.k1 = model.multiplicity_of(lmin);
    } else if (lmin < lo) {
        r.min_branch = Branch::Gaussian;
        r.k1 = model.multiplicity_of(lmin);
    }
    if (at_threshold(lmax, hi)) {
        r.max_branch = Branch::TracyWidom;
        r.k2 = model.multiplicity_of(lmax);
    } else if (lmax > hi) {
        r.max_branch = Branch::Gaussian;
        r.k2 = model.multiplicity_of(lmax);
    }
    return r;
}

double LawSpec::scaled(double lambda, int M) const {
    const double f = std::pow(static_cast<double>(M), exponent) / scale;
    return side == Side::Min ? f * (center - lambda) : f * (lambda - center);
}

double LawSpec::unscaled(double x, int M) const {
    const double f = scale / std::pow(static_cast<double>(M), exponent);
    return side == Side::Min ? center - f * x : center + f * x;
}

LawSpec scaling_for(const SpikedModel& model, Side side) {
    const Regime r = classify(model);
    const double g = model.gamma;
    LawSpec s;
    s.side = side;
    const Branch b = side == Side::Min ? r.min_branch : r.max_branch;
    const int k = side == Side::Min ? r.k1 : r.k2;
    if (b == Branch::TracyWidom) {
        s.family = LawFamily::F;
        s.k = k;
        s.exponent = 2.0 / 3.0;
        if (side == Side::Min) {
            s.center = (1 - 1 / g) * (1 - 1 / g);
            s.scale = std::pow(g - 1, 4.0 / 3.0) / g;
        } else {
            s.center = (1 + 1 / g) * (1 + 1 / g);
            s.scale = std::pow(g + 1, 4.0 / 3.0) / g;
        }
        return s;
    }
    const double ell = side == Side::Min ? model.smallest() : model.largest();
    const double v2 = ell * ell - ell * ell / (g * g) / ((ell - 1) * (ell - 1));
    if (!(v2 > 0)) throw ThresholdViolation("scaling_for: spike is not beyond the threshold");
    s.family = LawFamily::G;
    s.k = k;
    s.exponent = 0.5;
    s.center = almost_sure_limit(ell, g);
    s.scale = std::sqrt(v2);
    return s;
}

std::pair<double, double> mp_edges(double gamma) {
    check_gamma(gamma);
    return {(1 - 1 / gamma) * (1 - 1 / gamma), (1 + 1 / gamma) * (1 + 1 / gamma)};
}

double almost_sure_limit(double ell, double gamma) {
    check_gamma(gamma);
    if (ell >= 1 - 1 / gamma && ell <= 1 + 1 / gamma)
        throw NotSeparatedError("almost_sure_limit: spike inside [1 - 1/gamma, 1 + 1/gamma]");
    return ell + ell / (gamma * gamma) / (ell - 1);
}

LawValue tracy_widom_F_detailed(int k, double x, int nodes) {
    if (k < 0 || k > 8) throw DomainError("F_k: k must lie in [0, 8]");
    if (!std::isfinite(x)) {
        if (x > 0) return {1.0, false};
        return {0.0, true};
    }
    if (x < law_left_cap) return {0.0, true};
    const QuadratureRule rule = semi_infinite_rule(x, law_map_scale, nodes);
    const int n = rule.size();
    std::vector<AiryPair> ai(n);
    for (int i = 0; i < n; ++i) ai[i] = airy(rule.nodes(i));
    Eigen::MatrixXd raw(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) raw(i, j) = airy_kernel(rule.nodes(i), rule.nodes(j), ai[i], ai[j]);
    const DiscretizedOperator op{weight_kernel_matrix(raw, rule, rule), rule, rule, "airy"};
    const double det0 = fredholm_det(op);
    if (k == 0) return {clamp_probability(det0, "F_0"), false};
    // F_k <= F_0, so a negligible F_0 settles the value without the resolvent.
    if (det0 < 1e-14) return {0.0, true};
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(k, k);
    std::vector<Eigen::VectorXd> t(k, Eigen::VectorXd(n)), s(k, Eigen::VectorXd(n));
    for (int i = 0; i < n; ++i) {
        const std::vector<double> sv = s_m_all(k, rule.nodes(i));
        for (int m = 1; m <= k; ++m) {
            t[m - 1](i) = t_m(m, rule.nodes(i));
            s[m - 1](i) = sv[m - 1];
        }
    }
    for (int m = 1; m <= k; ++m) {
        const Eigen::VectorXd y = resolvent_apply(op, s[m - 1]);
        for (int c = 1; c <= k; ++c) corr(m - 1, c - 1) -= inner_product(rule, y, t[c - 1]);
    }
    return {clamp_probability(det0 * corr.determinant(), "F_k"), false};
}

double tracy_widom_F(int k, double x, int nodes) { return tracy_widom_F_detailed(k, x, nodes).value; }

double gue_edge_G(int k, double x) {
    if (k < 1 || k > 8) throw DomainError("G_k: k must lie in [1, 8]");
    if (std::isnan(x)) throw DomainError("G_k: NaN argument");
    const double lo = -8.0;
    if (x <= lo) return 0.0;
    const double hi = std::min(x, 12.0);
    const int panels = std::max(1, static_cast<int>(std::ceil(hi - lo)));
    const QuadratureRule rule = composite_rule(lo, hi, panels, 20);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    std::vector<double> he(k);
    for (int q = 0; q < rule.size(); ++q) {
        const double t = rule.nodes(q);
        for (int i = 0; i < k; ++i) he[i] = hermite_he(i, t);
        const double w = rule.weights(q) * std::exp(-0.5 * t * t);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) gram(i, j) += w * he[i] * he[j];
    }
    // normalize by the x -> inf limit sqrt(2 pi) i!
    Eigen::VectorXd norm(k);
    for (int i = 0; i < k; ++i) norm(i) = 1 / std::sqrt(std::sqrt(2 * std::numbers::pi) * std::tgamma(i + 1.0));
    gram = norm.asDiagonal() * gram * norm.asDiagonal();
    return clamp_probability(gram.determinant(), "G_k");
}

double law_cdf(LawFamily family, int k, double x, int nodes) {
    return family == LawFamily::F ? tracy_widom_F(k, x, nodes) : gue_edge_G(k, x);
}

double law_cdf(const LawSpec& spec, double x, int nodes) { return law_cdf(spec.family, spec.k, x, nodes); }

std::string family_name(LawFamily family) { return family == LawFamily::F ? "F" : "G"; }

LawFamily parse_family(const std::string& name) {
    if (name == "F" || name == "TracyWidomGeneralized") return LawFamily::F;
    if (name == "G" || name == "GUEEdge") return LawFamily::G;
    throw UsageError("unknown law family '" + name + "'");
}

LawTable tabulate_law(LawFamily family, int k, double from, double to, double step, int nodes, int jobs) {
    if (!(step > 0) || !(to >= from)) throw DomainError("tabulate_law: bad grid");
    const int count = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
    LawTable table{family, k, nodes, std::vector<LawTableRow>(count)};
    parallel_for(count, jobs, [&](int i) {
        const double x = from + i * step;
        LawTableRow row{x, 0, 0, false};
        try {
            if (family == LawFamily::F) {
                const LawValue v = tracy_widom_F_detailed(k, x, nodes);
                row.value = v.value;
                row.tail_flag = v.tail_flag;
                row.error_estimate = std::abs(v.value - tracy_widom_F(k, x, 2 * nodes));
            } else {
                row.value = gue_edge_G(k, x);
            }
        } catch (const Error& e) {
            throw NumericalFailure("tabulate_law: evaluation failed at x = " + std::to_string(x) + ": " + e.what());
        }
        table.rows[i] = row;
    });
    return table;
}

TabulatedLaw::TabulatedLaw(LawFamily family, int k, double from, double to, double step, int nodes) {
    const int count = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
    x_.resize(count);
    v_.resize(count);
    for (int i = 0; i < count; ++i) {
        x_[i] = from + i * step;
        v_[i] = law_cdf(family, k, x_[i], nodes);
    }
    // remove rounding-level decreases so the inverse is well defined
    for (int i = 1; i < count; ++i) v_[i] = std::max(v_[i], v_[i - 1]);
}

double TabulatedLaw::cdf(double x) const {
    if (x <= x_.front()) return v_.front();
    if (x >= x_.back()) return 1.0;
    const double h = x_[1] - x_[0];
    const auto i = static_cast<std::size_t>(std::min<double>(std::floor((x - x_.front()) / h), x_.size() - 2.0));
    const double t = (x - x_[i]) / h;
    return v_[i] + t * (v_[i + 1] - v_[i]);
}

double TabulatedLaw::quantile(double p) const {
    if (!(p > 0 && p < 1)) throw DomainError("quantile: p must lie in (0, 1)");
    double a = x_.front(), b = x_.back();
    for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
        const double mid = 0.5 * (a + b);
        if (cdf(mid) < p)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace spiked

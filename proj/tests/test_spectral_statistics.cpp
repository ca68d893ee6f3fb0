#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>

#include "spiked/errors.hpp"
#include "spiked/spectral_statistics.hpp"

using namespace spiked;

namespace {

double phi(double x) { return boost::math::cdf(boost::math::normal(), x); }

std::vector<double> normals(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    return v;
}

LawSpec g1() {
    LawSpec s;
    s.family = LawFamily::G;
    s.k = 1;
    return s;
}

}  // namespace

TEST_CASE("KS statistic") {
    const TabulatedLaw tab(LawFamily::G, 1);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> draws(10000);
    for (double& x : draws) x = tab.quantile(u(rng));
    CHECK(ks_statistic(make_distribution(draws, {}), g1()).ks < 0.03);

    const EmpiricalDistribution constant = make_distribution(std::vector<double>(500, 0.0), {});
    CHECK(std::abs(ks_statistic(constant, g1()).ks - 0.5) <= 1.0 / 500);

    for (double x : {-1.0, 0.3}) {
        const GoFReport r = ks_statistic(make_distribution({x}, {}), phi);
        CHECK(r.ks == doctest::Approx(std::max(phi(x), 1 - phi(x))).epsilon(1e-12));
        CHECK(r.n == 1u);
    }

    // exact sup for a hand-made sample against the uniform CDF on [0, 1]
    const Cdf uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_statistic(make_distribution({0.1, 0.2, 0.9}, {}), uniform).ks == doctest::Approx(2.0 / 3 - 0.2));

    // rank statistic: an increasing transform of sample and law together leaves KS unchanged
    const std::vector<double> z = normals(2000, 8);
    std::vector<double> ez(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) ez[i] = std::exp(z[i]);
    const double a = ks_statistic(make_distribution(z, {}), phi).ks;
    const double b = ks_statistic(make_distribution(ez, {}), [](double y) { return phi(std::log(y)); }).ks;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));

    CHECK_THROWS_AS(ks_statistic(make_distribution({1.0}, {}), [](double) -> double { throw DomainError("x"); }),
                    NumericalFailure);
}

TEST_CASE("independence defect") {
    const std::vector<double> x = normals(10000, 1), y = normals(10000, 2);
    const EmpiricalDistribution dx = make_distribution(x, {}), dy = make_distribution(y, {});
    const IndependenceReport ind = independence_defect(dx, dy);
    CHECK(ind.defect < 0.025);
    CHECK(std::abs(ind.correlation) < 0.05);
    CHECK(ind.defect >= 0);

    // comonotone pairs from G_1: joint 0.5 against product 0.25 at the medians
    const IndependenceReport co = independence_defect(dx, make_distribution(x, {}));
    CHECK(co.defect >= 0.2);
    CHECK(co.correlation == doctest::Approx(1.0));

    // copula invariance under separate increasing maps
    std::vector<double> ex(x.size()), ay(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        ex[i] = std::exp(x[i]);
        ay[i] = 3 * y[i] - 7;
    }
    const IndependenceReport t = independence_defect(make_distribution(ex, {}), make_distribution(ay, {}));
    CHECK(t.defect == ind.defect);

    const double env = independence_envelope(dx, dy, 200, 0.99, 7);
    CHECK(env > 0);
    CHECK(env < 0.05);
    CHECK(independence_envelope(dx, dy, 200, 0.99, 7) == env);
    CHECK_THROWS_AS(independence_defect(dx, make_distribution({1.0, 2.0}, {})), UnpairedSamplesError);
}

TEST_CASE("condition number law and statistic") {
    const SpikedModel m = SpikedModel::from_gamma(200, 2.0);
    const CompositeLaw law = condition_number_law(m);
    CHECK(law.regime == 1);
    CHECK(law.cx == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(law.cy == doctest::Approx(2 / std::pow(3.0, 2.0 / 3)).epsilon(1e-14));
    CHECK(law.cy == doctest::Approx(0.96150).epsilon(1e-5));

    const double ratio = std::pow((1 + 0.5) / (1 - 0.5), 2);
    const ConditionNumberStat zero = condition_number_stat({{0, 0.3, 0.3 * ratio}}, m);
    CHECK(std::abs(zero.statistic[0]) < 1e-12);

    const ConditionNumberStat s = condition_number_stat({{0, 0.21, 2.4}, {1, 0.3, 2.0}}, m);
    for (const auto& [i, p] : {std::pair{0, ExtremePair{0, 0.21, 2.4}}, std::pair{1, ExtremePair{1, 0.3, 2.0}}})
        CHECK(s.statistic[i] == doctest::Approx(condition_identity_rhs(p, m)).epsilon(1e-12));
    CHECK_THROWS_AS(condition_number_stat({{0, 0.0, 1.0}}, m), DomainError);
    CHECK_THROWS_AS(condition_identity_rhs({0, 0.2, 2.0}, SpikedModel::from_gamma(200, 2.0, {{0.25, 1}})),
                    RegimeMismatchError);

    const CompositeLaw gauss = condition_number_law(SpikedModel::from_gamma(200, 2.0, {{0.25, 1}}));
    CHECK(gauss.regime == 2);
    CHECK(gauss.law_x.has_value());
    CHECK_FALSE(gauss.law_y.has_value());

    // composite draws: mean is the coefficient-weighted law mean
    const std::vector<double> draws = sample_composite(gauss, 20000, 3);
    double mean = 0;
    for (double v : draws) mean += v;
    CHECK(std::abs(mean / draws.size()) < 4 * gauss.cx / std::sqrt(20000.0));
    CHECK(sample_composite(gauss, 10, 3) == std::vector<double>(draws.begin(), draws.begin() + 10));
}

TEST_CASE("hypothesis test") {
    const SpikedModel m = SpikedModel::from_gamma(200, 2.0);
    const LawSpec lmin = scaling_for(m, Side::Min), lmax = scaling_for(m, Side::Max);
    const TabulatedLaw f0(LawFamily::F, 0);
    const double med = f0.quantile(0.5);
    const HypothesisResult h = hypothesis_test(lmin.unscaled(med, m.M), lmax.unscaled(med, m.M), m, 0.05);
    CHECK(h.T == doctest::Approx(0.25).epsilon(1e-3));
    CHECK_FALSE(h.reject);
    CHECK(h.scaled_min == doctest::Approx(med).epsilon(1e-10));

    const HypothesisResult far = hypothesis_test(0.25, 100.0, m, 0.001);
    CHECK(far.T < 1e-12);
    CHECK(far.reject);

    double prev = 2;
    for (double lmax_v : {2.0, 2.2, 2.3, 2.4}) {
        const double t = hypothesis_test(0.25, lmax_v, m, 0.05).T;
        CHECK(t <= prev);
        prev = t;
    }
    prev = 2;
    for (double lmin_v : {0.3, 0.26, 0.24, 0.2}) {
        const double t = hypothesis_test(lmin_v, 2.25, m, 0.05).T;
        CHECK(t <= prev);
        prev = t;
    }
    CHECK_THROWS_AS(hypothesis_test(0.25, 2.25, m, 0.0), DomainError);
}

TEST_CASE("hypothesis test size under the null") {
    // T is a product of two independent uniforms in the limit, so P(T <= a) = a (1 - log a)
    const SpikedModel m = SpikedModel::from_gamma(200, 2.0);
    EnsembleRun run;
    run.model = m;
    run.replicates = 2000;
    run.seed = 77;
    const EnsembleResult r = sample_extremes(run);
    int rejected = 0;
    for (const ExtremePair& p : r.pairs) rejected += hypothesis_test(p.lambda_min, p.lambda_max, m, 0.05).reject;
    const double rate = static_cast<double>(rejected) / r.pairs.size();
    const double limit = 0.05 * (1 - std::log(0.05));
    const double se = std::sqrt(limit * (1 - limit) / r.pairs.size());
    MESSAGE("empirical size " << rate << ", limit " << limit);
    CHECK(rate >= 0.005);
    CHECK(std::abs(rate - limit) < 4 * se + 0.02);
}

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>
#include <set>

#include "spiked/errors.hpp"
#include "spiked/spiked_ensemble.hpp"

using namespace spiked;

namespace {

EnsembleResult run(const SpikedModel& m, int reps, std::uint64_t seed, int jobs = 1) {
    EnsembleRun r;
    r.model = m;
    r.replicates = reps;
    r.seed = seed;
    return sample_extremes(r, jobs);
}

double mean_of(const EnsembleResult& r, bool max_side) {
    double s = 0;
    for (const ExtremePair& p : r.pairs) s += max_side ? p.lambda_max : p.lambda_min;
    return s / r.pairs.size();
}

}  // namespace

TEST_CASE("replicate streams are distinct and deterministic") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(replicate_seed(42, i));
    CHECK(seen.size() == 10000u);
    CHECK(replicate_seed(42, 7) == replicate_seed(42, 7));
    CHECK(replicate_seed(42, 7) != replicate_seed(43, 7));
}

TEST_CASE("one-dimensional spectra") {
    // N = M = 1 is outside the model's gamma > 1 range, so build the struct directly
    SpikedModel one;
    one.N = 1;
    one.M = 1;
    one.gamma = 1;
    const int reps = 100000;
    double mean = 0;
    for (int r = 0; r < reps; ++r) mean += sample_spectrum(one, replicate_seed(3, r))(0);
    CHECK(std::abs(mean / reps - 1) < 1e-2);

    // lambda ~ Gamma(M, 1) / M, so P(lambda >= 1) = Q(M, M)
    const SpikedModel m = SpikedModel::from_dimensions(1, 20);
    const EnsembleResult res = run(m, reps, 11);
    double hits = 0;
    for (const ExtremePair& p : res.pairs) {
        CHECK(p.lambda_min == p.lambda_max);
        hits += p.lambda_min >= 1.0;
    }
    const double q = boost::math::gamma_q(20.0, 20.0);
    const double se = std::sqrt(q * (1 - q) / reps);
    CHECK(std::abs(hits / reps - q) < 3 * se);
}

TEST_CASE("spike variances enter the rows") {
    // with M large, S approaches the population covariance
    const SpikedModel m = SpikedModel::from_dimensions(3, 20000, {{4.0, 1}, {0.25, 1}});
    const Eigen::VectorXd ev = sample_spectrum(m, 5);
    CHECK(ev(0) == doctest::Approx(0.25).epsilon(0.05));
    CHECK(ev(1) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(ev(2) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("null extremes approach the bulk edges") {
    const EnsembleResult r = run(SpikedModel::from_gamma(200, 2.0), 200, 1);
    REQUIRE(r.failures.empty());
    CHECK(std::abs(mean_of(r, true) - 2.25) < 0.05);
    CHECK(std::abs(mean_of(r, false) - 0.25) < 0.05);

    double prev = INFINITY;
    for (int N : {50, 100, 200}) {
        const double d = std::abs(mean_of(run(SpikedModel::from_gamma(N, 2.0), 200, 2), true) - 2.25);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("determinism, threading and eigenvalue sanity") {
    const SpikedModel m = SpikedModel::from_gamma(30, 1.5, {{0.4, 2}, {2.5, 1}});
    const EnsembleResult a = run(m, 64, 9, 1), b = run(m, 64, 9, 1), c = run(m, 64, 9, 4);
    REQUIRE(a.pairs.size() == 64u);
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].replicate == static_cast<int>(i));
        CHECK(a.pairs[i].lambda_min == b.pairs[i].lambda_min);
        CHECK(a.pairs[i].lambda_max == c.pairs[i].lambda_max);
        CHECK(a.pairs[i].lambda_min == c.pairs[i].lambda_min);
        CHECK(a.pairs[i].lambda_min <= a.pairs[i].lambda_max);
    }
    for (int r = 0; r < 8; ++r) CHECK(sample_spectrum(m, replicate_seed(9, r)).minCoeff() >= -1e-10);
    CHECK(run(m, 4, 10).pairs[0].lambda_min != a.pairs[0].lambda_min);

    // spike order in the input does not matter
    const SpikedModel p = SpikedModel::from_gamma(30, 1.5, {{2.5, 1}, {0.4, 2}});
    const EnsembleResult d = run(p, 8, 9);
    for (int i = 0; i < 8; ++i) CHECK(d.pairs[i].lambda_max == a.pairs[i].lambda_max);
    CHECK_THROWS_AS(run(m, 0, 1), DomainError);
}

TEST_CASE("scale_extremes") {
    const SpikedModel m = SpikedModel::from_gamma(200, 2.0);
    const std::vector<ExtremePair> pairs = {{0, 0.25, 2.25}, {1, 0.20, 2.30}, {2, 0.22, 2.40}};
    const EmpiricalDistribution dmin = scale_extremes(pairs, m, Side::Min);
    const EmpiricalDistribution dmax = scale_extremes(pairs, m, Side::Max);
    CHECK(dmin.samples[0] == 0.0);
    CHECK(dmax.samples[0] == 0.0);
    CHECK(dmin.samples[1] == doctest::Approx(2 * std::pow(800.0, 2.0 / 3) * 0.05).epsilon(1e-12));
    CHECK(dmin.samples[1] == doctest::Approx(8.6177).epsilon(1e-4));
    CHECK(dmin.samples[1] > dmin.samples[2]);
    CHECK(dmax.samples[2] > dmax.samples[1]);
    CHECK(std::is_sorted(dmin.sorted.begin(), dmin.sorted.end()));
    CHECK(dmin.replicates == std::vector<int>{0, 1, 2});
    CHECK(dmin.law.side == Side::Min);

    // Gaussian branch: lambda at the almost sure limit scales to 0
    const SpikedModel g = SpikedModel::from_gamma(200, 2.0, {{0.25, 1}});
    CHECK(scale_extremes({{0, 1.0 / 6, 2.0}}, g, Side::Min).samples[0] == doctest::Approx(0.0));
}

TEST_CASE("empirical CDFs") {
    const EmpiricalDistribution d = make_distribution({3.0, 1.0, 2.0, 2.0}, {}, Side::Min);
    CHECK(ecdf(d, 0.5) == 0.0);
    CHECK(ecdf(d, 1.0) == 0.25);
    CHECK(ecdf(d, 2.0) == 0.75);
    CHECK(ecdf(d, 10.0) == 1.0);
    const EmpiricalDistribution e = make_distribution({0.5, 0.1, 0.7, 0.3}, {}, Side::Max);
    for (double y : {0.0, 0.3, 0.6, 1.0}) CHECK(joint_ecdf(d, e, INFINITY, y) == ecdf(e, y));
    CHECK(joint_ecdf(d, e, 2.0, 0.5) == 0.5);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    std::vector<double> a(10000), b(10000);
    for (int i = 0; i < 10000; ++i) {
        a[i] = g(rng);
        b[i] = g(rng);
    }
    const double j = joint_ecdf(make_distribution(a, {}), make_distribution(b, {}), 0.0, 0.0);
    CHECK(std::abs(j - 0.25) < 3 * std::sqrt(0.25 / 10000));

    std::vector<int> shifted = {1, 2, 3, 4};
    const EmpiricalDistribution f = make_distribution({0.5, 0.1, 0.7, 0.3}, shifted, Side::Max);
    CHECK_THROWS_AS(joint_ecdf(d, f, 1.0, 1.0), UnpairedSamplesError);
    CHECK_THROWS_AS(joint_ecdf(d, make_distribution({1.0}, {}), 1.0, 1.0), UnpairedSamplesError);
}
